#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forage/kv.hpp"
#include "forage/parallel.hpp"
#include "forage/params.hpp"
#include "forage/stats.hpp"
#include "forage/types.hpp"

namespace forage {

enum class Campaign { Scalability, Adaptation, Custom };
std::string_view to_string(Campaign c);
Campaign campaign_from_string(std::string_view s);

struct PlanRow {
    Mode mode = Mode::CPFA;
    int n_robots = 0;
    int n_targets = 0;
    double sim_minutes = 0.0;

    bool operator==(const PlanRow&) const = default;
};

struct ParamsSource {
    enum class Kind { Baseline, Fixed, Evolved };
    Kind kind = Kind::Baseline;  // Baseline: the documented default ParamSet
    ParamSet fixed;              // Kind::Fixed: inline values
    std::string path;            // Kind::Evolved: file in the ParamSet key-value format
};

struct ExperimentPlan {
    Campaign campaign = Campaign::Custom;
    std::vector<PlanRow> rows;
    int n_replicates = 100;
    ParamsSource params_source;
    std::uint64_t seed = 0;
};

/// One message per violation; empty means the plan is runnable. Checks the
/// campaign invariants: scalability rows must multiply to 480 robot-minutes,
/// adaptation rows must use 32 robots.
std::vector<std::string> validate_plan(const ExperimentPlan& plan);

/// Built-in sweeps, both modes per level.
/// Scalability: {4x120, 8x60, 16x30, 32x15, 64x7.5} minutes, 1024 targets.
ExperimentPlan scalability_plan(std::uint64_t seed = 0, int n_replicates = 100);
/// Adaptation: 32 robots, {128:5, 256:8, 512:10, 1024:12, 2048:30} targets:minutes.
ExperimentPlan adaptation_plan(std::uint64_t seed = 0, int n_replicates = 100);

/// Plan file grammar: a `[plan]` section (campaign, replicates, seed, and
/// optionally `params = <path>`), an optional inline `[params]` section, and
/// one `[row]` section per experiment row (mode, n_robots, n_targets,
/// sim_minutes). Throws std::invalid_argument on malformed input.
ExperimentPlan parse_plan(const KvDoc& doc);
ExperimentPlan load_plan(const std::string& path);

/// Loads (Evolved) or copies (Fixed) the parameters and validates them.
ParamSet resolve_params(const ParamsSource& source);

/// hash(plan seed, row content, replicate index); the world seed of one
/// replicate.
std::uint64_t replicate_seed(std::uint64_t plan_seed, const PlanRow& row, int replicate);

struct ReplicateOutcome {
    int replicate = 0;
    std::uint64_t seed = 0;
    bool fault = false;
    std::string fault_message;

    long long targets_collected = 0;
    double collision_s = 0.0;
    double travel_s = 0.0;
    double search_s = 0.0;

    double forage_rate = 0.0;  // targets per robot per minute; 0 when none collected
    // seconds per target; missing when nothing was collected
    std::optional<double> collision_eff;
    std::optional<double> travel_eff;
    std::optional<double> search_eff;
};

struct RowResult {
    PlanRow row;
    int n_replicates = 0;
    std::vector<ReplicateOutcome> replicates;
    int n_faults = 0;
    int n_zero_collected = 0;
    bool failed = false;  // more than 10% of replicates faulted

    SampleStats forage_rate_stats;    // over all non-faulted replicates
    SampleStats collision_eff_stats;  // over replicates that collected > 0
    SampleStats travel_eff_stats;
    SampleStats search_eff_stats;
};

/// Runs n_replicates independent worlds of one row. Replicates fan out via
/// `policy`; faults are recorded per replicate, never thrown.
RowResult run_row(const PlanRow& row, const ParamSet& params, int n_replicates,
                  std::uint64_t plan_seed, const ExecPolicy& policy = {});

struct CampaignResult {
    Campaign campaign = Campaign::Custom;
    int n_replicates = 0;
    std::uint64_t seed = 0;
    std::vector<RowResult> rows;

    bool any_row_failed() const;
};

/// Runs every row of a validated plan with the given (already resolved)
/// parameters. `on_row` fires as each row finishes.
CampaignResult run_plan(const ExperimentPlan& plan, const ParamSet& params,
                        const ExecPolicy& policy = {},
                        const std::function<void(const RowResult&)>& on_row = {});

struct MetricComparison {
    int n_robots = 0;
    int n_targets = 0;
    double sim_minutes = 0.0;
    std::string metric;
    double cpfa_mean = 0.0;
    double mpfa_mean = 0.0;
    double ratio = 0.0;            // mpfa / cpfa
    double improvement_pct = 0.0;  // (mpfa - cpfa) / cpfa * 100
    double welch_t = 0.0;
    double welch_df = 0.0;
    double welch_p = 1.0;
    int cpfa_n = 0;
    int mpfa_n = 0;
};

struct RegressionEntry {
    Mode mode = Mode::CPFA;
    std::string metric;
    RegressionResult reg;
};

struct ComparisonReport {
    std::vector<MetricComparison> comparisons;
    std::vector<RegressionEntry> regressions;  // scalability/adaptation campaigns only
};

/// Per matched (CPFA, MPFA) row pair: mean ratio, percentage improvement and
/// Welch test per metric; per campaign: log-linear regression of row means on
/// log2(swarm size or target count) per mode per metric.
ComparisonReport compare_modes(const CampaignResult& result);

// --- CSV persistence ------------------------------------------------------

/// Header plus one line per non-faulted replicate:
/// campaign,mode,n_robots,n_targets,sim_minutes,replicate,seed,
/// targets_collected,collision_s,travel_s,search_s
std::string results_csv(const CampaignResult& result);

/// Per-row aggregates: replicate bookkeeping plus mean/sd/ci95 of each metric.
std::string summary_csv(const CampaignResult& result);

std::string comparison_csv(const CampaignResult& result, const ComparisonReport& report);
std::string regression_csv(const CampaignResult& result, const ComparisonReport& report);

/// Rebuilds a CampaignResult from results_csv text: replicate metric lists
/// are recovered exactly (%.17g round-trip), efficiencies recomputed, and all
/// row statistics re-derived. Fault bookkeeping is not representable in
/// results.csv, so recovered rows report zero faults.
CampaignResult parse_results_csv(const std::string& text);

}  // namespace forage
