#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>

#include "CLI11.hpp"
#include "forage/ga.hpp"
#include "forage/harness.hpp"
#include "forage/world.hpp"

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void reject_unknown_keys(const forage::KvSection& section,
                         std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : section.entries) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("unknown key '" + key + "' in [" + section.name + "]");
        }
    }
}

forage::EvolutionConfig load_evolution_config(const std::string& path) {
    forage::EvolutionConfig cfg;
    if (path.empty()) return cfg;
    forage::KvDoc doc = forage::KvDoc::load(path);
    if (const forage::KvSection* s = doc.find("evolution")) {
        reject_unknown_keys(*s, {"population", "generations", "crossover_prob", "mutation_rate",
                                 "mutation_sd", "evals", "convergence_window",
                                 "convergence_epsilon", "diversity_epsilon"});
        cfg.population_size = static_cast<int>(s->get_int_or("population", cfg.population_size));
        cfg.max_generations =
            static_cast<int>(s->get_int_or("generations", cfg.max_generations));
        cfg.crossover_prob = s->get_double_or("crossover_prob", cfg.crossover_prob);
        cfg.mutation_rate = s->get_double_or("mutation_rate", cfg.mutation_rate);
        cfg.mutation_sd = s->get_double_or("mutation_sd", cfg.mutation_sd);
        cfg.n_fitness_evals = static_cast<int>(s->get_int_or("evals", cfg.n_fitness_evals));
        cfg.convergence_window =
            static_cast<int>(s->get_int_or("convergence_window", cfg.convergence_window));
        cfg.convergence_epsilon = s->get_double_or("convergence_epsilon", cfg.convergence_epsilon);
        cfg.diversity_epsilon = s->get_double_or("diversity_epsilon", cfg.diversity_epsilon);
    }
    if (const forage::KvSection* w = doc.find("world")) {
        reject_unknown_keys(*w, {"robots", "targets", "minutes", "arena_side", "dt"});
        cfg.eval_world.n_robots = static_cast<int>(w->get_int_or("robots", cfg.eval_world.n_robots));
        cfg.eval_world.n_targets =
            static_cast<int>(w->get_int_or("targets", cfg.eval_world.n_targets));
        cfg.eval_world.sim_minutes = w->get_double_or("minutes", cfg.eval_world.sim_minutes);
        cfg.eval_world.arena_side = w->get_double_or("arena_side", cfg.eval_world.arena_side);
        cfg.eval_world.dt = w->get_double_or("dt", cfg.eval_world.dt);
    }
    return cfg;
}

int cmd_evolve(const std::string& mode, const std::string& config_path, std::uint64_t seed,
               const std::string& out_dir, const forage::ExecPolicy& policy) {
    forage::EvolutionConfig cfg = load_evolution_config(config_path);
    cfg.eval_world.mode = forage::mode_from_string(mode);
    cfg.seed = seed;

    auto violations = cfg.validate();
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "config error: " << v << "\n";
        return 2;
    }

    std::printf("evolving %s: population %d, up to %d generations, %d evals\n", mode.c_str(),
                cfg.population_size, cfg.max_generations, cfg.n_fitness_evals);
    forage::EvolutionRecord record =
        forage::evolve(cfg, policy, [](const forage::GenerationStats& g) {
            std::printf("gen %3d  best %10.3f  mean %10.3f  sd %9.3f  diversity %.4f\n",
                        g.generation, g.best_fitness, g.mean_fitness, g.sd_fitness, g.diversity);
            std::fflush(stdout);
        });

    std::string reasons;
    for (auto r : record.termination) {
        if (!reasons.empty()) reasons += "+";
        reasons += std::string(forage::to_string(r));
    }
    std::printf("terminated after %zu generations (%s); best fitness %.3f\n",
                record.generations.size(), reasons.c_str(), record.best_fitness);

    write_text_file(fs::path(out_dir) / "evolution.csv", record.to_csv());
    write_text_file(fs::path(out_dir) / "best.params", forage::serialize_params(record.best_genome));
    std::printf("wrote %s/evolution.csv and %s/best.params\n", out_dir.c_str(), out_dir.c_str());
    return 0;
}

forage::ExperimentPlan load_and_override_plan(const std::string& plan_path,
                                              const std::string& params_path,
                                              std::optional<int> replicates,
                                              std::optional<std::uint64_t> seed) {
    forage::ExperimentPlan plan = forage::load_plan(plan_path);
    if (!params_path.empty()) {
        plan.params_source.kind = forage::ParamsSource::Kind::Evolved;
        plan.params_source.path = params_path;
    }
    if (replicates) plan.n_replicates = *replicates;
    if (seed) plan.seed = *seed;
    return plan;
}

int check_plan(const forage::ExperimentPlan& plan) {
    auto violations = forage::validate_plan(plan);
    if (violations.empty()) return 0;
    for (const auto& v : violations) std::cerr << "plan error: " << v << "\n";
    return 2;
}

void write_trace(const forage::ExperimentPlan& plan, const forage::ParamSet& params,
                 const std::string& trace_path) {
    const forage::PlanRow& row = plan.rows.front();
    forage::WorldConfig cfg;
    cfg.mode = row.mode;
    cfg.n_robots = row.n_robots;
    cfg.n_targets = row.n_targets;
    cfg.sim_minutes = row.sim_minutes;

    std::string csv = "tick,robot,x,y,fsm\n";
    char buf[160];
    forage::run_replicate(cfg, params, forage::replicate_seed(plan.seed, row, 0),
                          [&](const forage::World& w) {
                              for (const forage::RobotState& r : w.robots()) {
                                  std::snprintf(buf, sizeof buf, "%lld,%d,%.6f,%.6f,%s\n",
                                                w.tick(), r.id, r.pose.x, r.pose.y,
                                                std::string(to_string(r.fsm)).c_str());
                                  csv += buf;
                              }
                          });
    write_text_file(trace_path, csv);
    std::printf("wrote per-tick trace of row 0 replicate 0 to %s\n", trace_path.c_str());
}

forage::CampaignResult run_campaign(const forage::ExperimentPlan& plan,
                                    const forage::ParamSet& params,
                                    const forage::ExecPolicy& policy) {
    return forage::run_plan(plan, params, policy, [&](const forage::RowResult& row) {
        std::printf("%s %2d robots %5d targets %6.1f min: forage_rate %.4f +/- %.4f"
                    " (faults %d, empty %d)\n",
                    std::string(to_string(row.row.mode)).c_str(), row.row.n_robots,
                    row.row.n_targets, row.row.sim_minutes, row.forage_rate_stats.mean,
                    row.forage_rate_stats.sd, row.n_faults, row.n_zero_collected);
        std::fflush(stdout);
    });
}

int cmd_run(const std::string& plan_path, const std::string& params_path,
            std::optional<int> replicates, std::optional<std::uint64_t> seed,
            const std::string& out_dir, const std::string& trace_path,
            const forage::ExecPolicy& policy) {
    forage::ExperimentPlan plan =
        load_and_override_plan(plan_path, params_path, replicates, seed);
    if (int rc = check_plan(plan)) return rc;
    forage::ParamSet params = forage::resolve_params(plan.params_source);

    if (!trace_path.empty()) write_trace(plan, params, trace_path);

    forage::CampaignResult result = run_campaign(plan, params, policy);
    write_text_file(fs::path(out_dir) / "results.csv", forage::results_csv(result));
    write_text_file(fs::path(out_dir) / "summary.csv", forage::summary_csv(result));
    std::printf("wrote %s/results.csv and %s/summary.csv\n", out_dir.c_str(), out_dir.c_str());

    if (result.any_row_failed()) {
        std::cerr << "error: a row exceeded the 10% replicate fault budget\n";
        return 3;
    }
    return 0;
}

int cmd_compare(const std::string& plan_path, const std::string& params_path,
                std::optional<int> replicates, std::optional<std::uint64_t> seed,
                const std::string& out_dir, const forage::ExecPolicy& policy) {
    forage::ExperimentPlan plan =
        load_and_override_plan(plan_path, params_path, replicates, seed);
    if (int rc = check_plan(plan)) return rc;
    forage::ParamSet params = forage::resolve_params(plan.params_source);

    forage::CampaignResult result = run_campaign(plan, params, policy);
    forage::ComparisonReport report = forage::compare_modes(result);

    write_text_file(fs::path(out_dir) / "results.csv", forage::results_csv(result));
    write_text_file(fs::path(out_dir) / "summary.csv", forage::summary_csv(result));
    write_text_file(fs::path(out_dir) / "comparison.csv", forage::comparison_csv(result, report));
    write_text_file(fs::path(out_dir) / "regression.csv", forage::regression_csv(result, report));

    for (const forage::MetricComparison& c : report.comparisons) {
        if (c.metric != "forage_rate") continue;
        std::printf("%2d robots %5d targets: forage_rate cpfa %.4f mpfa %.4f (%+.1f%%, p=%.4g)\n",
                    c.n_robots, c.n_targets, c.cpfa_mean, c.mpfa_mean, c.improvement_pct,
                    c.welch_p);
    }
    std::printf("wrote results/summary/comparison/regression csv files to %s\n", out_dir.c_str());

    if (result.any_row_failed()) {
        std::cerr << "error: a row exceeded the 10% replicate fault budget\n";
        return 3;
    }
    return 0;
}

int cmd_stats(const std::string& in_dir) {
    fs::path results = fs::path(in_dir) / "results.csv";
    std::ifstream in(results, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read " << results.string() << "\n";
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    forage::CampaignResult result = forage::parse_results_csv(buf.str());

    write_text_file(fs::path(in_dir) / "summary.csv", forage::summary_csv(result));
    bool has_cpfa = false, has_mpfa = false;
    for (const auto& row : result.rows) {
        (row.row.mode == forage::Mode::CPFA ? has_cpfa : has_mpfa) = true;
    }
    if (has_cpfa && has_mpfa) {
        forage::ComparisonReport report = forage::compare_modes(result);
        write_text_file(fs::path(in_dir) / "comparison.csv",
                        forage::comparison_csv(result, report));
        write_text_file(fs::path(in_dir) / "regression.csv",
                        forage::regression_csv(result, report));
        std::printf("recomputed summary/comparison/regression csv files in %s\n", in_dir.c_str());
    } else {
        std::printf("recomputed summary.csv in %s\n", in_dir.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swarm foraging simulator: CPFA/MPFA experiments and evolution"};
    app.require_subcommand(1);

    forage::ExecPolicy policy;
    app.add_flag("--serial", policy.serial, "disable parallel execution")->configurable(false);
    app.add_option("--jobs", policy.threads, "worker thread count (0 = auto)");

    // evolve
    auto* evolve = app.add_subcommand("evolve", "evolve controller parameters");
    std::string ev_mode;
    std::string ev_config;
    std::uint64_t ev_seed = 0;
    std::string ev_out = "out";
    evolve->add_option("--mode", ev_mode, "cpfa or mpfa")->required();
    evolve->add_option("--config", ev_config, "evolution config file");
    evolve->add_option("--seed", ev_seed, "master seed");
    evolve->add_option("--out", ev_out, "output directory")->required();

    // run
    auto* run = app.add_subcommand("run", "run an experiment plan");
    std::string run_plan_path, run_params, run_out = "out", run_trace;
    std::optional<int> run_reps;
    std::optional<std::uint64_t> run_seed;
    run->add_option("--plan", run_plan_path, "plan file")->required();
    run->add_option("--params", run_params, "params file (overrides the plan's source)");
    run->add_option("--replicates", run_reps, "replicates per row (overrides the plan)");
    run->add_option("--seed", run_seed, "plan seed (overrides the plan)");
    run->add_option("--out", run_out, "output directory")->required();
    run->add_option("--trace", run_trace, "write a per-tick trace of row 0 replicate 0");

    // compare
    auto* compare = app.add_subcommand("compare", "run a plan and compare CPFA vs MPFA");
    std::string cmp_plan_path, cmp_params, cmp_out = "out";
    std::optional<int> cmp_reps;
    std::optional<std::uint64_t> cmp_seed;
    compare->add_option("--plan", cmp_plan_path, "plan file")->required();
    compare->add_option("--params", cmp_params, "params file (overrides the plan's source)");
    compare->add_option("--replicates", cmp_reps, "replicates per row (overrides the plan)");
    compare->add_option("--seed", cmp_seed, "plan seed (overrides the plan)");
    compare->add_option("--out", cmp_out, "output directory")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "recompute statistics from results.csv");
    std::string stats_in;
    stats->add_option("--in", stats_in, "directory containing results.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (evolve->parsed()) return cmd_evolve(ev_mode, ev_config, ev_seed, ev_out, policy);
        if (run->parsed()) {
            return cmd_run(run_plan_path, run_params, run_reps, run_seed, run_out, run_trace,
                           policy);
        }
        if (compare->parsed()) {
            return cmd_compare(cmp_plan_path, cmp_params, cmp_reps, cmp_seed, cmp_out, policy);
        }
        if (stats->parsed()) return cmd_stats(stats_in);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
