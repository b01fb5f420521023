#include "forage/kv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forage {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail_line(int line_no, const std::string& why) {
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

bool KvSection::has(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return true;
    }
    return false;
}

const std::string& KvSection::get(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    std::string where = name.empty() ? "top level" : "[" + name + "]";
    throw std::out_of_range("missing key '" + std::string(key) + "' in " + where);
}

std::string KvSection::get_or(std::string_view key, std::string fallback) const {
    return has(key) ? get(key) : std::move(fallback);
}

double KvSection::get_double(std::string_view key) const {
    const std::string& raw = get(key);
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || !trim(end).empty()) {
        throw std::invalid_argument("key '" + std::string(key) + "': not a number: " + raw);
    }
    return v;
}

double KvSection::get_double_or(std::string_view key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KvSection::get_int(std::string_view key) const {
    const std::string& raw = get(key);
    char* end = nullptr;
    long long v = std::strtoll(raw.c_str(), &end, 10);
    if (end == raw.c_str() || !trim(end).empty()) {
        throw std::invalid_argument("key '" + std::string(key) + "': not an integer: " + raw);
    }
    return v;
}

long long KvSection::get_int_or(std::string_view key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

KvDoc KvDoc::parse(std::string_view text) {
    KvDoc doc;
    doc.sections.push_back(KvSection{});  // unnamed prologue section

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail_line(line_no, "unterminated section header");
            std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail_line(line_no, "empty section name");
            doc.sections.push_back(KvSection{std::string(name), {}});
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail_line(line_no, "expected 'key = value'");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) fail_line(line_no, "empty key");
        doc.sections.back().entries.emplace_back(std::string(key), std::string(value));
    }

    // Drop the prologue if nothing preceded the first header.
    if (doc.sections.size() > 1 && doc.sections.front().entries.empty()) {
        doc.sections.erase(doc.sections.begin());
    }
    return doc;
}

KvDoc KvDoc::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const KvSection* KvDoc::find(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::vector<const KvSection*> KvDoc::all(std::string_view name) const {
    std::vector<const KvSection*> out;
    for (const auto& s : sections) {
        if (s.name == name) out.push_back(&s);
    }
    return out;
}

}  // namespace forage
