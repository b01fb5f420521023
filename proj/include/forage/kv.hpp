#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forage {

/// One `[name]` block of a key-value config file. Entries keep file order;
/// lookups return the first match.
struct KvSection {
    std::string name;  // "" for keys that appear before any section header
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(std::string_view key) const;
    const std::string& get(std::string_view key) const;  // throws std::out_of_range
    std::string get_or(std::string_view key, std::string fallback) const;
    double get_double(std::string_view key) const;
    double get_double_or(std::string_view key, double fallback) const;
    long long get_int(std::string_view key) const;
    long long get_int_or(std::string_view key, long long fallback) const;
};

/// Flat key-value config text: `key = value` lines, `# comment` lines, and
/// `[section]` headers that may repeat (e.g. one `[row]` per experiment row).
struct KvDoc {
    std::vector<KvSection> sections;

    /// Throws std::invalid_argument naming the offending line.
    static KvDoc parse(std::string_view text);
    /// Throws std::runtime_error if the file cannot be read.
    static KvDoc load(const std::string& path);

    const KvSection* find(std::string_view name) const;
    std::vector<const KvSection*> all(std::string_view name) const;
};

}  // namespace forage
