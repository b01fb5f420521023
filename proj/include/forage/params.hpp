#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "forage/rng.hpp"

namespace forage {

/// The seven controller parameters shared by the CPFA and the MPFA. This is
/// also the genome evolved by the optimizer.
struct ParamSet {
    double p_search = 0.0;   // P(travel -> uninformed search) per decision step
    double p_return = 0.0;   // P(give up search -> return) per decision step
    double omega = 0.0;      // uninformed search variation, also informed-decay asymptote [rad]
    double lambda_id = 0.0;  // rate of informed search decay [1/s]
    double lambda_sf = 0.0;  // rate of site fidelity (Poisson parameter)
    double lambda_lp = 0.0;  // rate of laying pheromone (Poisson parameter)
    double lambda_pd = 0.0;  // rate of pheromone decay [1/s]

    static constexpr int kGenes = 7;

    double gene(int i) const;
    void set_gene(int i, double v);

    bool operator==(const ParamSet&) const = default;
};

/// Per-gene interval used for GA normalization (mutation scale, diversity) and
/// for clamping initial draws. lambda_id and lambda_pd are only bounded below
/// by their validity range; the upper bounds here are the working ranges the
/// optimizer explores.
struct GeneRange {
    double lo;
    double hi;
};

const std::array<GeneRange, ParamSet::kGenes>& gene_ranges();
const std::array<std::string_view, ParamSet::kGenes>& gene_names();

/// Maps seven quantiles in [0,1) through the initialization distributions:
/// U(0,1), U(0,1), U(0,pi), Exp(5), U(0,20), U(0,20), Exp(10); exponential
/// draws are clamped to the working gene range.
ParamSet params_from_quantiles(const std::array<double, ParamSet::kGenes>& q);

ParamSet sample_initial_params(Rng& rng);

/// Hand-tuned defaults for running experiments without a prior evolution
/// run: moderate dispersal, patient search, strong site fidelity and
/// pheromone laying, slow pheromone decay.
ParamSet baseline_params();

/// Returns one message per violated invariant; empty means valid. Never throws.
std::vector<std::string> validate_params(const ParamSet& p);

/// One `name = value` line per gene, full double precision.
std::string serialize_params(const ParamSet& p);

/// Parses the serialize_params format. Requires each of the seven names
/// exactly once; throws std::invalid_argument otherwise.
ParamSet parse_params(std::string_view text);

}  // namespace forage
