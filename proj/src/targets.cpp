#include "forage/targets.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace forage {

namespace {

/// Row-major positions of an m-point grid with `cols` columns, relative to
/// the anchor (lower-left corner).
std::vector<Vec2> grid_points(int m, int cols, double spacing) {
    std::vector<Vec2> pts;
    pts.reserve(m);
    for (int i = 0; i < m; ++i) {
        int row = i / cols;
        int col = i % cols;
        pts.push_back(Vec2{col * spacing, row * spacing});
    }
    return pts;
}

/// Draws an anchor so every grid point stays inside [0, side]^2 and no point
/// comes within `clearance` of a nest. Pure rejection sampling; draw order is
/// part of the determinism contract.
Vec2 place_cluster(const std::vector<Vec2>& shape, double side,
                   const std::vector<Vec2>& nests, double clearance, Rng& rng) {
    double extent_x = 0.0, extent_y = 0.0;
    for (const Vec2& p : shape) {
        extent_x = std::max(extent_x, p.x);
        extent_y = std::max(extent_y, p.y);
    }
    if (extent_x > side || extent_y > side) {
        throw std::runtime_error("cluster does not fit inside the arena");
    }
    constexpr int kMaxTries = 10000;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
        Vec2 anchor{rng.uniform(0.0, side - extent_x), rng.uniform(0.0, side - extent_y)};
        bool clear = true;
        for (const Vec2& p : shape) {
            Vec2 world = anchor + p;
            for (const Vec2& nest : nests) {
                if (distance(world, nest) < clearance) {
                    clear = false;
                    break;
                }
            }
            if (!clear) break;
        }
        if (clear) return anchor;
    }
    throw std::runtime_error("could not place cluster clear of nests");
}

}  // namespace

TargetField uniform_random(int n, double arena_side, Rng& rng) {
    if (n < 0) throw std::invalid_argument("uniform_random: n must be non-negative");
    TargetField field;
    field.targets.reserve(n);
    for (int i = 0; i < n; ++i) {
        field.targets.push_back(Vec2{rng.uniform(0.0, arena_side), rng.uniform(0.0, arena_side)});
    }
    field.n_scattered = n;
    return field;
}

TargetField partially_clustered(int n, double arena_side, const std::vector<Vec2>& nests,
                                Rng& rng, const ClusterLayout& layout) {
    if (n < 1) throw std::invalid_argument("partially_clustered: n must be at least 1");
    if (n < 16) {
        TargetField field = uniform_random(n, arena_side, rng);
        field.degraded = true;
        return field;
    }

    const int n_large = n / 4;
    const int n_medium = n / 4;
    const int n_scattered = n - n_large - n_medium;

    TargetField field;
    field.targets.reserve(n);
    field.n_large = n_large;
    field.n_medium = n_medium;
    field.n_scattered = n_scattered;

    // One large square-ish grid.
    const int large_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_large))));
    std::vector<Vec2> shape = grid_points(n_large, large_cols, layout.grid_spacing);
    Vec2 anchor = place_cluster(shape, arena_side, nests, layout.nest_clearance, rng);
    for (const Vec2& p : shape) field.targets.push_back(anchor + p);

    // Medium 4x4 clusters; the last may be partial.
    const int per_cluster = layout.medium_cluster_size;
    const int medium_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(per_cluster))));
    int remaining = n_medium;
    while (remaining > 0) {
        int m = std::min(remaining, per_cluster);
        shape = grid_points(m, medium_cols, layout.grid_spacing);
        anchor = place_cluster(shape, arena_side, nests, layout.nest_clearance, rng);
        for (const Vec2& p : shape) field.targets.push_back(anchor + p);
        remaining -= m;
    }

    // Individually scattered targets.
    for (int i = 0; i < n_scattered; ++i) {
        field.targets.push_back(Vec2{rng.uniform(0.0, arena_side), rng.uniform(0.0, arena_side)});
    }
    return field;
}

std::string serialize_targets(const TargetField& field) {
    std::string out;
    out.reserve(field.targets.size() * 24);
    char buf[80];
    for (const Vec2& t : field.targets) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t.x, t.y);
        out += buf;
    }
    return out;
}

}  // namespace forage
