#include "forage/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "forage/rng.hpp"
#include "forage/world.hpp"

namespace forage {

namespace {

const char* const kMetricNames[4] = {"forage_rate", "collision_eff", "travel_eff", "search_eff"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const SampleStats& s) {
    return fmt(s.mean) + "," + fmt(s.sd) + "," + fmt(s.ci95_half);
}

}  // namespace

std::string_view to_string(Campaign c) {
    switch (c) {
        case Campaign::Scalability: return "scalability";
        case Campaign::Adaptation: return "adaptation";
        case Campaign::Custom: return "custom";
    }
    return "unknown";
}

Campaign campaign_from_string(std::string_view s) {
    if (s == "scalability") return Campaign::Scalability;
    if (s == "adaptation") return Campaign::Adaptation;
    if (s == "custom") return Campaign::Custom;
    throw std::invalid_argument("unknown campaign: " + std::string(s));
}

std::vector<std::string> validate_plan(const ExperimentPlan& plan) {
    std::vector<std::string> out;
    if (plan.rows.empty()) out.push_back("plan has no rows");
    if (plan.n_replicates < 1) out.push_back("n_replicates must be at least 1");
    if (plan.params_source.kind == ParamsSource::Kind::Evolved && plan.params_source.path.empty()) {
        out.push_back("evolved params source needs a path");
    }
    for (std::size_t i = 0; i < plan.rows.size(); ++i) {
        const PlanRow& r = plan.rows[i];
        const std::string where = "row " + std::to_string(i) + ": ";
        if (r.n_robots < 1) out.push_back(where + "n_robots must be at least 1");
        if (r.n_targets < 1) out.push_back(where + "n_targets must be at least 1");
        if (!(r.sim_minutes > 0.0)) out.push_back(where + "sim_minutes must be positive");
        if (plan.campaign == Campaign::Scalability &&
            r.n_robots * r.sim_minutes != 480.0) {
            out.push_back(where + "scalability rows must total 480 robot-minutes, got " +
                          fmt(r.n_robots * r.sim_minutes));
        }
        if (plan.campaign == Campaign::Adaptation && r.n_robots != 32) {
            out.push_back(where + "adaptation rows must use 32 robots");
        }
    }
    return out;
}

ExperimentPlan scalability_plan(std::uint64_t seed, int n_replicates) {
    ExperimentPlan plan;
    plan.campaign = Campaign::Scalability;
    plan.seed = seed;
    plan.n_replicates = n_replicates;
    const std::pair<int, double> levels[] = {{4, 120.0}, {8, 60.0}, {16, 30.0},
                                             {32, 15.0}, {64, 7.5}};
    for (const auto& [robots, minutes] : levels) {
        for (Mode mode : {Mode::CPFA, Mode::MPFA}) {
            plan.rows.push_back(PlanRow{mode, robots, 1024, minutes});
        }
    }
    return plan;
}

ExperimentPlan adaptation_plan(std::uint64_t seed, int n_replicates) {
    ExperimentPlan plan;
    plan.campaign = Campaign::Adaptation;
    plan.seed = seed;
    plan.n_replicates = n_replicates;
    const std::pair<int, double> levels[] = {{128, 5.0}, {256, 8.0}, {512, 10.0},
                                             {1024, 12.0}, {2048, 30.0}};
    for (const auto& [targets, minutes] : levels) {
        for (Mode mode : {Mode::CPFA, Mode::MPFA}) {
            plan.rows.push_back(PlanRow{mode, 32, targets, minutes});
        }
    }
    return plan;
}

ExperimentPlan parse_plan(const KvDoc& doc) {
    ExperimentPlan plan;
    if (const KvSection* head = doc.find("plan")) {
        plan.campaign = campaign_from_string(head->get_or("campaign", "custom"));
        plan.n_replicates = static_cast<int>(head->get_int_or("replicates", 100));
        plan.seed = static_cast<std::uint64_t>(head->get_int_or("seed", 0));
        if (head->has("params")) {
            plan.params_source.kind = ParamsSource::Kind::Evolved;
            plan.params_source.path = head->get("params");
        }
    }
    if (const KvSection* inline_params = doc.find("params")) {
        if (plan.params_source.kind == ParamsSource::Kind::Evolved) {
            throw std::invalid_argument(
                "plan gives both a params path and an inline [params] section");
        }
        std::string text;
        for (const auto& [k, v] : inline_params->entries) text += k + " = " + v + "\n";
        plan.params_source.kind = ParamsSource::Kind::Fixed;
        plan.params_source.fixed = parse_params(text);
    }
    for (const KvSection* row : doc.all("row")) {
        PlanRow r;
        r.mode = mode_from_string(row->get("mode"));
        r.n_robots = static_cast<int>(row->get_int("n_robots"));
        r.n_targets = static_cast<int>(row->get_int("n_targets"));
        r.sim_minutes = row->get_double("sim_minutes");
        plan.rows.push_back(r);
    }
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    return parse_plan(KvDoc::load(path));
}

ParamSet resolve_params(const ParamsSource& source) {
    ParamSet params;
    if (source.kind == ParamsSource::Kind::Baseline) {
        params = baseline_params();
    } else if (source.kind == ParamsSource::Kind::Fixed) {
        params = source.fixed;
    } else {
        std::ifstream in(source.path);
        if (!in) throw std::runtime_error("cannot read params file: " + source.path);
        std::ostringstream buf;
        buf << in.rdbuf();
        params = parse_params(buf.str());
    }
    auto violations = validate_params(params);
    if (!violations.empty()) {
        throw std::invalid_argument("invalid params: " + violations.front());
    }
    return params;
}

std::uint64_t replicate_seed(std::uint64_t plan_seed, const PlanRow& row, int replicate) {
    const std::uint64_t row_key =
        derive_seed(row.mode == Mode::MPFA ? 2u : 1u, static_cast<std::uint64_t>(row.n_robots),
                    static_cast<std::uint64_t>(row.n_targets),
                    std::bit_cast<std::uint64_t>(row.sim_minutes));
    return derive_seed(plan_seed, row_key, static_cast<std::uint64_t>(replicate));
}

RowResult run_row(const PlanRow& row, const ParamSet& params, int n_replicates,
                  std::uint64_t plan_seed, const ExecPolicy& policy) {
    if (n_replicates < 1) throw std::invalid_argument("run_row: n_replicates must be at least 1");
    auto pviol = validate_params(params);
    if (!pviol.empty()) throw std::invalid_argument("run_row: invalid params: " + pviol.front());

    WorldConfig base;
    base.mode = row.mode;
    base.n_robots = row.n_robots;
    base.n_targets = row.n_targets;
    base.sim_minutes = row.sim_minutes;
    auto cviol = base.validate();
    if (!cviol.empty()) throw std::invalid_argument("run_row: invalid row: " + cviol.front());

    RowResult out;
    out.row = row;
    out.n_replicates = n_replicates;
    out.replicates.resize(n_replicates);

    parallel_for(n_replicates, policy, [&](long long rep) {
        ReplicateOutcome& o = out.replicates[rep];
        o.replicate = static_cast<int>(rep);
        o.seed = replicate_seed(plan_seed, row, static_cast<int>(rep));
        try {
            Metrics m = run_replicate(base, params, o.seed);
            o.targets_collected = m.targets_collected;
            o.collision_s = m.total_collision_s;
            o.travel_s = m.total_travel_s;
            o.search_s = m.total_search_s;
            o.forage_rate = static_cast<double>(m.targets_collected) /
                            (static_cast<double>(row.n_robots) * row.sim_minutes);
            if (m.targets_collected > 0) {
                const auto collected = static_cast<double>(m.targets_collected);
                o.collision_eff = m.total_collision_s / collected;
                o.travel_eff = m.total_travel_s / collected;
                o.search_eff = m.total_search_s / collected;
            }
        } catch (const std::exception& e) {
            o.fault = true;
            o.fault_message = e.what();
        }
    });

    std::vector<double> fr, ce, te, se;
    for (const ReplicateOutcome& o : out.replicates) {
        if (o.fault) {
            ++out.n_faults;
            continue;
        }
        fr.push_back(o.forage_rate);
        if (o.targets_collected == 0) {
            ++out.n_zero_collected;
            continue;
        }
        ce.push_back(*o.collision_eff);
        te.push_back(*o.travel_eff);
        se.push_back(*o.search_eff);
    }
    out.forage_rate_stats = summarize(fr);
    out.collision_eff_stats = summarize(ce);
    out.travel_eff_stats = summarize(te);
    out.search_eff_stats = summarize(se);
    out.failed = 10 * out.n_faults > n_replicates;
    return out;
}

bool CampaignResult::any_row_failed() const {
    return std::any_of(rows.begin(), rows.end(), [](const RowResult& r) { return r.failed; });
}

CampaignResult run_plan(const ExperimentPlan& plan, const ParamSet& params,
                        const ExecPolicy& policy,
                        const std::function<void(const RowResult&)>& on_row) {
    auto violations = validate_plan(plan);
    if (!violations.empty()) throw std::invalid_argument("invalid plan: " + violations.front());

    CampaignResult result;
    result.campaign = plan.campaign;
    result.n_replicates = plan.n_replicates;
    result.seed = plan.seed;
    result.rows.reserve(plan.rows.size());
    for (const PlanRow& row : plan.rows) {
        result.rows.push_back(run_row(row, params, plan.n_replicates, plan.seed, policy));
        if (on_row) on_row(result.rows.back());
    }
    return result;
}

namespace {

/// Metric vectors of one row for the comparison tests: forage_rate over all
/// clean replicates, efficiencies over those that collected something.
std::vector<double> metric_values(const RowResult& row, int metric) {
    std::vector<double> out;
    for (const ReplicateOutcome& o : row.replicates) {
        if (o.fault) continue;
        switch (metric) {
            case 0: out.push_back(o.forage_rate); break;
            case 1:
                if (o.collision_eff) out.push_back(*o.collision_eff);
                break;
            case 2:
                if (o.travel_eff) out.push_back(*o.travel_eff);
                break;
            case 3:
                if (o.search_eff) out.push_back(*o.search_eff);
                break;
        }
    }
    return out;
}

const SampleStats& metric_stats(const RowResult& row, int metric) {
    switch (metric) {
        case 1: return row.collision_eff_stats;
        case 2: return row.travel_eff_stats;
        case 3: return row.search_eff_stats;
        default: return row.forage_rate_stats;
    }
}

}  // namespace

ComparisonReport compare_modes(const CampaignResult& result) {
    ComparisonReport report;

    // Match rows across modes on (n_robots, n_targets, sim_minutes).
    std::map<std::tuple<int, int, double>, std::pair<const RowResult*, const RowResult*>> matched;
    for (const RowResult& row : result.rows) {
        auto key = std::make_tuple(row.row.n_robots, row.row.n_targets, row.row.sim_minutes);
        auto& slot = matched[key];
        (row.row.mode == Mode::CPFA ? slot.first : slot.second) = &row;
    }
    for (const auto& [key, pair] : matched) {
        const RowResult* cpfa = pair.first;
        const RowResult* mpfa = pair.second;
        if (!cpfa || !mpfa) continue;
        for (int metric = 0; metric < 4; ++metric) {
            MetricComparison c;
            c.n_robots = cpfa->row.n_robots;
            c.n_targets = cpfa->row.n_targets;
            c.sim_minutes = cpfa->row.sim_minutes;
            c.metric = kMetricNames[metric];
            std::vector<double> xs = metric_values(*mpfa, metric);
            std::vector<double> ys = metric_values(*cpfa, metric);
            c.mpfa_n = static_cast<int>(xs.size());
            c.cpfa_n = static_cast<int>(ys.size());
            c.cpfa_mean = metric_stats(*cpfa, metric).mean;
            c.mpfa_mean = metric_stats(*mpfa, metric).mean;
            c.ratio = c.mpfa_mean / c.cpfa_mean;
            c.improvement_pct = (c.mpfa_mean - c.cpfa_mean) / c.cpfa_mean * 100.0;
            try {
                WelchResult w = welch_t_test(xs, ys);
                c.welch_t = w.t;
                c.welch_df = w.df;
                c.welch_p = w.p;
            } catch (const std::exception&) {
                c.welch_t = std::numeric_limits<double>::quiet_NaN();
                c.welch_df = std::numeric_limits<double>::quiet_NaN();
                c.welch_p = std::numeric_limits<double>::quiet_NaN();
            }
            report.comparisons.push_back(std::move(c));
        }
    }

    // Trend per mode per metric against the campaign's swept level.
    if (result.campaign != Campaign::Custom) {
        const bool by_robots = result.campaign == Campaign::Scalability;
        for (Mode mode : {Mode::CPFA, Mode::MPFA}) {
            std::vector<double> levels;
            std::vector<std::vector<double>> means(4);
            for (const RowResult& row : result.rows) {
                if (row.row.mode != mode) continue;
                levels.push_back(
                    static_cast<double>(by_robots ? row.row.n_robots : row.row.n_targets));
                for (int metric = 0; metric < 4; ++metric) {
                    means[metric].push_back(metric_stats(row, metric).mean);
                }
            }
            if (levels.size() < 3) continue;
            for (int metric = 0; metric < 4; ++metric) {
                try {
                    RegressionEntry e;
                    e.mode = mode;
                    e.metric = kMetricNames[metric];
                    e.reg = loglinear_regression(levels, means[metric]);
                    report.regressions.push_back(std::move(e));
                } catch (const std::exception&) {
                    // degenerate level set; skip the trend line
                }
            }
        }
    }
    return report;
}

std::string results_csv(const CampaignResult& result) {
    std::string out =
        "campaign,mode,n_robots,n_targets,sim_minutes,replicate,seed,targets_collected,"
        "collision_s,travel_s,search_s\n";
    char buf[320];
    for (const RowResult& row : result.rows) {
        for (const ReplicateOutcome& o : row.replicates) {
            if (o.fault) continue;
            std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.17g,%d,%llu,%lld,%.17g,%.17g,%.17g\n",
                          std::string(to_string(result.campaign)).c_str(),
                          std::string(to_string(row.row.mode)).c_str(), row.row.n_robots,
                          row.row.n_targets, row.row.sim_minutes, o.replicate,
                          static_cast<unsigned long long>(o.seed), o.targets_collected,
                          o.collision_s, o.travel_s, o.search_s);
            out += buf;
        }
    }
    return out;
}

std::string summary_csv(const CampaignResult& result) {
    std::string out =
        "campaign,mode,n_robots,n_targets,sim_minutes,replicates,faults,zero_collected,"
        "forage_rate_mean,forage_rate_sd,forage_rate_ci95,"
        "collision_eff_mean,collision_eff_sd,collision_eff_ci95,"
        "travel_eff_mean,travel_eff_sd,travel_eff_ci95,"
        "search_eff_mean,search_eff_sd,search_eff_ci95\n";
    for (const RowResult& row : result.rows) {
        out += std::string(to_string(result.campaign)) + "," +
               std::string(to_string(row.row.mode)) + "," + std::to_string(row.row.n_robots) +
               "," + std::to_string(row.row.n_targets) + "," + fmt(row.row.sim_minutes) + "," +
               std::to_string(row.n_replicates) + "," + std::to_string(row.n_faults) + "," +
               std::to_string(row.n_zero_collected) + "," + fmt(row.forage_rate_stats) + "," +
               fmt(row.collision_eff_stats) + "," + fmt(row.travel_eff_stats) + "," +
               fmt(row.search_eff_stats) + "\n";
    }
    return out;
}

std::string comparison_csv(const CampaignResult& result, const ComparisonReport& report) {
    std::string out =
        "campaign,n_robots,n_targets,sim_minutes,robot_minutes,metric,cpfa_mean,mpfa_mean,"
        "ratio,improvement_pct,welch_t,welch_df,welch_p,cpfa_n,mpfa_n\n";
    for (const MetricComparison& c : report.comparisons) {
        out += std::string(to_string(result.campaign)) + "," + std::to_string(c.n_robots) + "," +
               std::to_string(c.n_targets) + "," + fmt(c.sim_minutes) + "," +
               fmt(c.n_robots * c.sim_minutes) + "," + c.metric + "," + fmt(c.cpfa_mean) + "," +
               fmt(c.mpfa_mean) + "," + fmt(c.ratio) + "," + fmt(c.improvement_pct) + "," +
               fmt(c.welch_t) + "," + fmt(c.welch_df) + "," + fmt(c.welch_p) + "," +
               std::to_string(c.cpfa_n) + "," + std::to_string(c.mpfa_n) + "\n";
    }
    return out;
}

std::string regression_csv(const CampaignResult& result, const ComparisonReport& report) {
    std::string out = "campaign,mode,metric,slope,intercept,r,p\n";
    for (const RegressionEntry& e : report.regressions) {
        out += std::string(to_string(result.campaign)) + "," + std::string(to_string(e.mode)) +
               "," + e.metric + "," + fmt(e.reg.slope) + "," + fmt(e.reg.intercept) + "," +
               fmt(e.reg.r) + "," + fmt(e.reg.p) + "\n";
    }
    return out;
}

CampaignResult parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("results csv: empty input");

    CampaignResult result;
    bool have_campaign = false;
    RowResult* current = nullptr;

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = s.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(s.substr(start));
                break;
            }
            fields.push_back(s.substr(start, comma - start));
            start = comma + 1;
        }
        return fields;
    };

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != 11) {
            throw std::invalid_argument("results csv line " + std::to_string(line_no) +
                                        ": expected 11 fields");
        }
        Campaign campaign = campaign_from_string(fields[0]);
        if (!have_campaign) {
            result.campaign = campaign;
            have_campaign = true;
        } else if (campaign != result.campaign) {
            throw std::invalid_argument("results csv: mixed campaigns");
        }

        PlanRow row;
        row.mode = mode_from_string(fields[1]);
        row.n_robots = std::stoi(fields[2]);
        row.n_targets = std::stoi(fields[3]);
        row.sim_minutes = std::stod(fields[4]);
        if (!current || !(current->row == row)) {
            result.rows.emplace_back();
            current = &result.rows.back();
            current->row = row;
        }

        ReplicateOutcome o;
        o.replicate = std::stoi(fields[5]);
        o.seed = std::stoull(fields[6]);
        o.targets_collected = std::stoll(fields[7]);
        o.collision_s = std::stod(fields[8]);
        o.travel_s = std::stod(fields[9]);
        o.search_s = std::stod(fields[10]);
        o.forage_rate = static_cast<double>(o.targets_collected) /
                        (static_cast<double>(row.n_robots) * row.sim_minutes);
        if (o.targets_collected > 0) {
            const auto collected = static_cast<double>(o.targets_collected);
            o.collision_eff = o.collision_s / collected;
            o.travel_eff = o.travel_s / collected;
            o.search_eff = o.search_s / collected;
        }
        current->replicates.push_back(std::move(o));
    }

    for (RowResult& row : result.rows) {
        row.n_replicates = static_cast<int>(row.replicates.size());
        std::vector<double> fr, ce, te, se;
        for (const ReplicateOutcome& o : row.replicates) {
            fr.push_back(o.forage_rate);
            if (o.targets_collected == 0) {
                ++row.n_zero_collected;
                continue;
            }
            ce.push_back(*o.collision_eff);
            te.push_back(*o.travel_eff);
            se.push_back(*o.search_eff);
        }
        row.forage_rate_stats = summarize(fr);
        row.collision_eff_stats = summarize(ce);
        row.travel_eff_stats = summarize(te);
        row.search_eff_stats = summarize(se);
        result.n_replicates = std::max(result.n_replicates, row.n_replicates);
    }
    return result;
}

}  // namespace forage
