#pragma once

#include <string>
#include <vector>

#include "forage/geometry.hpp"
#include "forage/rng.hpp"
#include "forage/types.hpp"

namespace forage {

/// A set of target positions in the corner frame [0, arena_side]^2.
struct TargetField {
    std::vector<Vec2> targets;
    int n_large = 0;      // targets in the single large grid cluster
    int n_medium = 0;     // targets across the medium 4x4 clusters
    int n_scattered = 0;  // individually placed targets
    bool degraded = false;  // true when n was too small for clusters (all uniform)

    int n() const { return static_cast<int>(targets.size()); }
};

/// n i.i.d. uniform points in [0, arena_side]^2.
TargetField uniform_random(int n, double arena_side, Rng& rng);

/// The partially clustered distribution: floor(n/4) targets in one large
/// square grid, floor(n/4) in 4x4 clusters of 16 (last one possibly partial),
/// and the remainder uniform random. Cluster anchors are drawn uniformly so
/// the whole grid fits in the arena, and redrawn while any cluster target
/// lies within layout.nest_clearance of a nest. For n < 16 the field
/// degrades to all-uniform and is flagged.
///
/// `nests` are in the same corner frame as the returned targets.
TargetField partially_clustered(int n, double arena_side, const std::vector<Vec2>& nests,
                                Rng& rng, const ClusterLayout& layout = {});

/// One "x,y" line per target, in placement order.
std::string serialize_targets(const TargetField& field);

}  // namespace forage
