#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "forage/parallel.hpp"
#include "forage/params.hpp"
#include "forage/rng.hpp"
#include "forage/types.hpp"

namespace forage {

struct EvolutionConfig {
    int population_size = 50;
    int max_generations = 100;
    double crossover_prob = 0.5;  // per-gene chance of inheriting from parent a
    double mutation_rate = 0.05;  // per-gene chance of perturbation
    double mutation_sd = 0.02;    // SD of the perturbation on range-normalized genes
    int n_fitness_evals = 8;
    WorldConfig eval_world;  // defaults below: 40 robots, 1024 targets, 12 min
    int convergence_window = 15;
    double convergence_epsilon = 1.0;  // fitness flat within this over the window
    double diversity_epsilon = 0.05;   // mean normalized per-gene SD at or below this
    std::uint64_t seed = 0;

    EvolutionConfig() {
        eval_world.n_robots = 40;
        eval_world.n_targets = 1024;
        eval_world.sim_minutes = 12.0;
    }

    std::vector<std::string> validate() const;
};

enum class TerminationReason { MaxGenerations, FitnessConverged, LowDiversity };
std::string_view to_string(TerminationReason r);

struct GenerationStats {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double sd_fitness = 0.0;
    double diversity = 0.0;  // mean per-gene normalized SD of the population
    ParamSet best_genome;
    int n_faulted = 0;  // individuals whose evaluation faulted this generation
};

struct EvolutionRecord {
    std::vector<GenerationStats> generations;
    std::vector<TerminationReason> termination;
    ParamSet best_genome;
    double best_fitness = 0.0;

    /// "generation,best,mean,sd" lines with a header.
    std::string to_csv() const;
};

struct FitnessResult {
    double fitness = 0.0;  // mean targets collected across the evals
    bool fault = false;
};

/// Seed for one fitness replicate; exposed so tests can reproduce single
/// evaluations.
std::uint64_t fitness_eval_seed(std::uint64_t seed, int generation, int individual, int eval);

/// Mean targets collected over cfg.n_fitness_evals replicates of
/// cfg.eval_world. A simulation fault in any replicate yields fitness 0 with
/// the fault flag set.
FitnessResult evaluate_fitness(const ParamSet& genome, const EvolutionConfig& cfg, int generation,
                               int individual);

/// Each gene drawn from parent a with probability crossover_prob, else b.
ParamSet uniform_crossover(const ParamSet& a, const ParamSet& b, double crossover_prob, Rng& rng);

/// Per-gene Gaussian mutation in range-normalized coordinates, clamped to the
/// gene's range.
ParamSet gaussian_mutate(const ParamSet& g, double rate, double sd, Rng& rng);

/// Elitism plus roulette selection, crossover, and mutation. The returned
/// population has the elite (best fitness, lowest index on ties) in slot 0.
std::vector<ParamSet> next_generation(const std::vector<ParamSet>& pop,
                                      const std::vector<double>& fitnesses,
                                      const EvolutionConfig& cfg, Rng& rng);

/// Mean over genes of the population SD of range-normalized gene values.
double population_diversity(const std::vector<ParamSet>& pop);

/// Termination reasons if the record warrants stopping after its last
/// generation; empty otherwise.
std::vector<TerminationReason> check_termination(const EvolutionRecord& record,
                                                 const EvolutionConfig& cfg);

/// Full evolution run. Fitness evaluations fan out over individuals x evals
/// via `policy`; everything else is sequential and deterministic in cfg.seed.
/// `on_generation` (if set) fires after each generation is scored.
EvolutionRecord evolve(const EvolutionConfig& cfg, const ExecPolicy& policy = {},
                       const std::function<void(const GenerationStats&)>& on_generation = {});

}  // namespace forage
