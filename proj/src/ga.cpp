#include "forage/ga.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "forage/stats.hpp"
#include "forage/world.hpp"

namespace forage {

std::vector<std::string> EvolutionConfig::validate() const {
    std::vector<std::string> out = eval_world.validate();
    if (population_size < 2) out.push_back("population_size must be at least 2");
    if (max_generations < 1) out.push_back("max_generations must be at least 1");
    if (n_fitness_evals < 1) out.push_back("n_fitness_evals must be at least 1");
    if (convergence_window < 1) out.push_back("convergence_window must be at least 1");
    auto probability = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) out.push_back(std::string(name) + " must be in [0, 1]");
    };
    probability(crossover_prob, "crossover_prob");
    probability(mutation_rate, "mutation_rate");
    if (!(mutation_sd >= 0.0)) out.push_back("mutation_sd must be non-negative");
    if (!(convergence_epsilon >= 0.0)) out.push_back("convergence_epsilon must be non-negative");
    if (!(diversity_epsilon >= 0.0)) out.push_back("diversity_epsilon must be non-negative");
    return out;
}

std::string_view to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::MaxGenerations: return "max_generations";
        case TerminationReason::FitnessConverged: return "fitness_converged";
        case TerminationReason::LowDiversity: return "low_diversity";
    }
    return "unknown";
}

std::string EvolutionRecord::to_csv() const {
    std::string out = "generation,best,mean,sd\n";
    char buf[128];
    for (const GenerationStats& g : generations) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", g.generation, g.best_fitness,
                      g.mean_fitness, g.sd_fitness);
        out += buf;
    }
    return out;
}

std::uint64_t fitness_eval_seed(std::uint64_t seed, int generation, int individual, int eval) {
    const std::uint64_t base = derive_seed(seed, 3, 0);
    return derive_seed(base, static_cast<std::uint64_t>(generation),
                       static_cast<std::uint64_t>(individual), static_cast<std::uint64_t>(eval));
}

FitnessResult evaluate_fitness(const ParamSet& genome, const EvolutionConfig& cfg, int generation,
                               int individual) {
    FitnessResult out;
    double sum = 0.0;
    for (int e = 0; e < cfg.n_fitness_evals; ++e) {
        try {
            Metrics m = run_replicate(cfg.eval_world, genome,
                                      fitness_eval_seed(cfg.seed, generation, individual, e));
            sum += static_cast<double>(m.targets_collected);
        } catch (const std::exception&) {
            out.fault = true;
        }
    }
    out.fitness = out.fault ? 0.0 : sum / cfg.n_fitness_evals;
    return out;
}

ParamSet uniform_crossover(const ParamSet& a, const ParamSet& b, double crossover_prob, Rng& rng) {
    ParamSet child;
    for (int i = 0; i < ParamSet::kGenes; ++i) {
        child.set_gene(i, rng.uniform() < crossover_prob ? a.gene(i) : b.gene(i));
    }
    return child;
}

ParamSet gaussian_mutate(const ParamSet& g, double rate, double sd, Rng& rng) {
    ParamSet out = g;
    const auto& ranges = gene_ranges();
    for (int i = 0; i < ParamSet::kGenes; ++i) {
        if (rng.uniform() >= rate) continue;
        const double span = ranges[i].hi - ranges[i].lo;
        double norm = (out.gene(i) - ranges[i].lo) / span;
        norm = std::clamp(norm + rng.normal(0.0, sd), 0.0, 1.0);
        out.set_gene(i, ranges[i].lo + norm * span);
    }
    return out;
}

namespace {

int argmax_lowest(const std::vector<double>& xs) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
        if (xs[i] > xs[best]) best = i;
    }
    return best;
}

}  // namespace

std::vector<ParamSet> next_generation(const std::vector<ParamSet>& pop,
                                      const std::vector<double>& fitnesses,
                                      const EvolutionConfig& cfg, Rng& rng) {
    if (pop.size() != fitnesses.size() || pop.empty()) {
        throw std::invalid_argument("next_generation: population/fitness size mismatch");
    }
    const int P = static_cast<int>(pop.size());
    double total = 0.0;
    for (double f : fitnesses) total += f;

    auto select = [&]() -> int {
        if (!(total > 0.0)) return static_cast<int>(rng.uniform_index(P));
        double u = rng.uniform() * total;
        double cum = 0.0;
        for (int i = 0; i < P; ++i) {
            cum += fitnesses[i];
            if (u < cum) return i;
        }
        return P - 1;
    };

    std::vector<ParamSet> out;
    out.reserve(P);
    out.push_back(pop[argmax_lowest(fitnesses)]);  // elite rides along unchanged
    while (static_cast<int>(out.size()) < P) {
        const ParamSet& pa = pop[select()];
        const ParamSet& pb = pop[select()];
        ParamSet child = uniform_crossover(pa, pb, cfg.crossover_prob, rng);
        out.push_back(gaussian_mutate(child, cfg.mutation_rate, cfg.mutation_sd, rng));
    }
    return out;
}

double population_diversity(const std::vector<ParamSet>& pop) {
    if (pop.size() < 2) return 0.0;
    const auto& ranges = gene_ranges();
    double acc = 0.0;
    std::vector<double> norm(pop.size());
    for (int g = 0; g < ParamSet::kGenes; ++g) {
        const double span = ranges[g].hi - ranges[g].lo;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            norm[i] = (pop[i].gene(g) - ranges[g].lo) / span;
        }
        acc += sample_sd(norm);
    }
    return acc / ParamSet::kGenes;
}

std::vector<TerminationReason> check_termination(const EvolutionRecord& record,
                                                 const EvolutionConfig& cfg) {
    const int g = static_cast<int>(record.generations.size());
    if (g == 0) return {};
    if (g >= cfg.max_generations) return {TerminationReason::MaxGenerations};
    if (g < cfg.convergence_window) return {};

    double lo = record.generations[g - cfg.convergence_window].best_fitness;
    double hi = lo;
    for (int i = g - cfg.convergence_window; i < g; ++i) {
        lo = std::min(lo, record.generations[i].best_fitness);
        hi = std::max(hi, record.generations[i].best_fitness);
    }
    const bool converged = hi - lo <= cfg.convergence_epsilon;
    const bool low_diversity = record.generations.back().diversity <= cfg.diversity_epsilon;
    if (converged && low_diversity) {
        return {TerminationReason::FitnessConverged, TerminationReason::LowDiversity};
    }
    return {};
}

EvolutionRecord evolve(const EvolutionConfig& cfg, const ExecPolicy& policy,
                       const std::function<void(const GenerationStats&)>& on_generation) {
    auto violations = cfg.validate();
    if (!violations.empty()) {
        throw std::invalid_argument("invalid evolution config: " + violations.front());
    }

    Rng ga_rng(derive_seed(cfg.seed, 4, 0));
    const int P = cfg.population_size;
    const int E = cfg.n_fitness_evals;

    std::vector<ParamSet> pop;
    pop.reserve(P);
    for (int i = 0; i < P; ++i) pop.push_back(sample_initial_params(ga_rng));

    EvolutionRecord record;
    double elite_cache = 0.0;
    bool have_elite = false;  // slot 0 carries its score from the previous generation

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        const int first = have_elite ? 1 : 0;
        std::vector<double> per_eval(static_cast<std::size_t>(P) * E, 0.0);
        std::vector<unsigned char> per_eval_fault(static_cast<std::size_t>(P) * E, 0);
        parallel_for(static_cast<long long>(P - first) * E, policy, [&](long long task) {
            const int i = first + static_cast<int>(task / E);
            const int e = static_cast<int>(task % E);
            try {
                Metrics m = run_replicate(cfg.eval_world, pop[i],
                                          fitness_eval_seed(cfg.seed, gen, i, e));
                per_eval[static_cast<std::size_t>(i) * E + e] =
                    static_cast<double>(m.targets_collected);
            } catch (const std::exception&) {
                per_eval_fault[static_cast<std::size_t>(i) * E + e] = 1;
            }
        });

        std::vector<double> fitness(P, 0.0);
        int n_faulted = 0;
        for (int i = 0; i < P; ++i) {
            if (have_elite && i == 0) {
                fitness[0] = elite_cache;
                continue;
            }
            bool fault = false;
            double sum = 0.0;
            for (int e = 0; e < E; ++e) {
                fault = fault || per_eval_fault[static_cast<std::size_t>(i) * E + e] != 0;
                sum += per_eval[static_cast<std::size_t>(i) * E + e];
            }
            if (fault) {
                ++n_faulted;
            } else {
                fitness[i] = sum / E;
            }
        }

        const int best = argmax_lowest(fitness);
        GenerationStats gs;
        gs.generation = gen;
        gs.best_fitness = fitness[best];
        gs.mean_fitness = mean_of(fitness);
        gs.sd_fitness = sample_sd(fitness);
        gs.diversity = population_diversity(pop);
        gs.best_genome = pop[best];
        gs.n_faulted = n_faulted;
        record.generations.push_back(gs);
        record.best_genome = gs.best_genome;
        record.best_fitness = gs.best_fitness;
        if (on_generation) on_generation(gs);

        auto reasons = check_termination(record, cfg);
        if (!reasons.empty()) {
            record.termination = reasons;
            break;
        }
        elite_cache = fitness[best];
        have_elite = true;
        pop = next_generation(pop, fitness, cfg, ga_rng);
    }
    if (record.termination.empty()) record.termination = {TerminationReason::MaxGenerations};
    return record;
}

}  // namespace forage
