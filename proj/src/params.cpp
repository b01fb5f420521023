#include "forage/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace forage {

namespace {

constexpr std::array<std::string_view, ParamSet::kGenes> kNames = {
    "p_search", "p_return", "omega", "lambda_id", "lambda_sf", "lambda_lp", "lambda_pd"};

constexpr std::array<GeneRange, ParamSet::kGenes> kRanges = {{
    {0.0, 1.0},    // p_search
    {0.0, 1.0},    // p_return
    {0.0, kPi},    // omega
    {0.0, 2.0},    // lambda_id (working range; validity is [0, inf))
    {0.0, 20.0},   // lambda_sf
    {0.0, 20.0},   // lambda_lp
    {0.0, 1.0},    // lambda_pd (working range; validity is [0, inf))
}};

double inv_exp(double q, double rate) { return -std::log(1.0 - q) / rate; }

}  // namespace

double ParamSet::gene(int i) const {
    switch (i) {
        case 0: return p_search;
        case 1: return p_return;
        case 2: return omega;
        case 3: return lambda_id;
        case 4: return lambda_sf;
        case 5: return lambda_lp;
        case 6: return lambda_pd;
    }
    throw std::out_of_range("gene index");
}

void ParamSet::set_gene(int i, double v) {
    switch (i) {
        case 0: p_search = v; return;
        case 1: p_return = v; return;
        case 2: omega = v; return;
        case 3: lambda_id = v; return;
        case 4: lambda_sf = v; return;
        case 5: lambda_lp = v; return;
        case 6: lambda_pd = v; return;
    }
    throw std::out_of_range("gene index");
}

const std::array<GeneRange, ParamSet::kGenes>& gene_ranges() { return kRanges; }
const std::array<std::string_view, ParamSet::kGenes>& gene_names() { return kNames; }

ParamSet params_from_quantiles(const std::array<double, ParamSet::kGenes>& q) {
    ParamSet p;
    p.p_search = q[0];
    p.p_return = q[1];
    p.omega = q[2] * kPi;
    p.lambda_id = std::min(inv_exp(q[3], 5.0), kRanges[3].hi);
    p.lambda_sf = q[4] * 20.0;
    p.lambda_lp = q[5] * 20.0;
    p.lambda_pd = std::min(inv_exp(q[6], 10.0), kRanges[6].hi);
    return p;
}

ParamSet sample_initial_params(Rng& rng) {
    std::array<double, ParamSet::kGenes> q;
    for (double& v : q) v = rng.uniform();
    return params_from_quantiles(q);
}

ParamSet baseline_params() {
    ParamSet p;
    p.p_search = 0.05;
    p.p_return = 0.02;
    p.omega = 0.7;
    p.lambda_id = 0.25;
    p.lambda_sf = 4.0;
    p.lambda_lp = 6.0;
    p.lambda_pd = 0.02;
    return p;
}

std::vector<std::string> validate_params(const ParamSet& p) {
    std::vector<std::string> violations;
    auto check = [&](int i, double lo, double hi, bool unbounded_above) {
        const double v = p.gene(i);
        if (!std::isfinite(v)) {
            violations.push_back(std::string(kNames[i]) + " is not finite");
            return;
        }
        if (v < lo || (!unbounded_above && v > hi)) {
            std::ostringstream os;
            os << kNames[i] << " out of [" << lo << ",";
            if (unbounded_above)
                os << "inf)";
            else
                os << hi << "]";
            violations.push_back(os.str());
        }
    };
    check(0, 0.0, 1.0, false);
    check(1, 0.0, 1.0, false);
    check(2, 0.0, kPi, false);
    check(3, 0.0, 0.0, true);
    check(4, 0.0, 20.0, false);
    check(5, 0.0, 20.0, false);
    check(6, 0.0, 0.0, true);
    return violations;
}

std::string serialize_params(const ParamSet& p) {
    std::string out;
    char buf[64];
    for (int i = 0; i < ParamSet::kGenes; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.gene(i));
        out += kNames[i];
        out += " = ";
        out += buf;
        out += '\n';
    }
    return out;
}

ParamSet parse_params(std::string_view text) {
    std::map<std::string, double, std::less<>> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("malformed parameter line: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (std::find(kNames.begin(), kNames.end(), key) == kNames.end())
            throw std::invalid_argument("unknown parameter: " + key);
        if (seen.count(key)) throw std::invalid_argument("duplicate parameter: " + key);
        size_t pos = 0;
        const double v = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("bad value for " + key + ": " + val);
        seen.emplace(key, v);
    }
    if (seen.size() != ParamSet::kGenes) throw std::invalid_argument("parameter block incomplete");
    ParamSet p;
    for (int i = 0; i < ParamSet::kGenes; ++i) p.set_gene(i, seen.at(std::string(kNames[i])));
    return p;
}

}  // namespace forage
