#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "forage/rng.hpp"
#include "forage/targets.hpp"

using namespace forage;

namespace {

const std::vector<Vec2> kCenterNest = {{7.5, 7.5}};

int count_within(const std::vector<Vec2>& pts, Vec2 c, double r) {
    return static_cast<int>(std::count_if(pts.begin(), pts.end(), [&](const Vec2& p) {
        return distance(p, c) < r;
    }));
}

}  // namespace

TEST_CASE("uniform_random fills the arena uniformly") {
    Rng rng(5);
    TargetField f = uniform_random(4000, 15.0, rng);
    CHECK(f.n() == 4000);
    CHECK(f.n_scattered == 4000);
    CHECK(f.n_large == 0);
    CHECK(!f.degraded);
    for (const Vec2& p : f.targets) {
        CHECK(p.x >= 0.0);
        CHECK(p.x < 15.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y < 15.0);
    }
    // Halves and quadrants are roughly evenly occupied.
    int left = static_cast<int>(std::count_if(f.targets.begin(), f.targets.end(),
                                              [](const Vec2& p) { return p.x < 7.5; }));
    CHECK(left > 1800);
    CHECK(left < 2200);
    int q00 = count_within(f.targets, {3.75, 3.75}, 5.3033);  // covers most of one quadrant
    CHECK(q00 > 600);
}

TEST_CASE("partially clustered split is quarter / quarter / half") {
    Rng rng(11);
    TargetField f = partially_clustered(1024, 15.0, kCenterNest, rng);
    CHECK(f.n() == 1024);
    CHECK(f.n_large == 256);
    CHECK(f.n_medium == 256);
    CHECK(f.n_scattered == 512);
    CHECK(!f.degraded);

    // Non-multiple-of-four counts keep the remainder in the scattered pool.
    Rng rng2(11);
    TargetField g = partially_clustered(1023, 15.0, kCenterNest, rng2);
    CHECK(g.n() == 1023);
    CHECK(g.n_large == 255);
    CHECK(g.n_medium == 255);
    CHECK(g.n_scattered == 513);
}

TEST_CASE("clustered targets stay inside the arena and clear of nests") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        TargetField f = partially_clustered(512, 15.0, kCenterNest, rng);
        for (const Vec2& p : f.targets) {
            CHECK(p.x >= 0.0);
            CHECK(p.x <= 15.0);
            CHECK(p.y >= 0.0);
            CHECK(p.y <= 15.0);
        }
        // Clustered points (first half) respect the nest clearance.
        for (int i = 0; i < f.n_large + f.n_medium; ++i) {
            CHECK(distance(f.targets[i], kCenterNest[0]) >= 0.5);
        }
    }
}

TEST_CASE("large cluster is one contiguous grid at 0.15 m spacing") {
    Rng rng(3);
    TargetField f = partially_clustered(1024, 15.0, kCenterNest, rng);
    // 256 points in a 16x16 grid: every point has a neighbor at exactly one
    // spacing, and the bounding box is 15 spacings on a side.
    double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
    for (int i = 0; i < f.n_large; ++i) {
        min_x = std::min(min_x, f.targets[i].x);
        max_x = std::max(max_x, f.targets[i].x);
        min_y = std::min(min_y, f.targets[i].y);
        max_y = std::max(max_y, f.targets[i].y);
    }
    CHECK(max_x - min_x == doctest::Approx(15 * 0.15));
    CHECK(max_y - min_y == doctest::Approx(15 * 0.15));

    // Medium clusters are 4x4 blocks: 16 of them for 256 targets.
    const double eps = 1e-9;
    for (int c = 0; c < 16; ++c) {
        int base = f.n_large + 16 * c;
        double bx = 1e9, by = 1e9;
        for (int i = 0; i < 16; ++i) {
            bx = std::min(bx, f.targets[base + i].x);
            by = std::min(by, f.targets[base + i].y);
        }
        for (int i = 0; i < 16; ++i) {
            double dx = (f.targets[base + i].x - bx) / 0.15;
            double dy = (f.targets[base + i].y - by) / 0.15;
            CHECK(std::abs(dx - std::round(dx)) < eps);
            CHECK(std::abs(dy - std::round(dy)) < eps);
            CHECK(std::round(dx) <= 3);
            CHECK(std::round(dy) <= 3);
        }
    }
}

TEST_CASE("small target counts degrade to all-scattered") {
    Rng rng(9);
    TargetField f = partially_clustered(8, 15.0, kCenterNest, rng);
    CHECK(f.degraded);
    CHECK(f.n() == 8);
    CHECK(f.n_scattered == 8);
    CHECK(f.n_large == 0);
}

TEST_CASE("generation is a pure function of the rng stream") {
    Rng a(77), b(77);
    TargetField f = partially_clustered(300, 15.0, kCenterNest, a);
    TargetField g = partially_clustered(300, 15.0, kCenterNest, b);
    REQUIRE(f.n() == g.n());
    for (int i = 0; i < f.n(); ++i) CHECK(f.targets[i] == g.targets[i]);
}

TEST_CASE("impossible placement throws instead of spinning") {
    Rng rng(1);
    // Clearance so large no anchor can satisfy it.
    ClusterLayout tight;
    tight.nest_clearance = 50.0;
    CHECK_THROWS_AS(partially_clustered(64, 15.0, kCenterNest, rng, tight),
                    std::runtime_error);
    // A cluster physically larger than the arena.
    ClusterLayout huge;
    huge.grid_spacing = 3.0;  // 16x16 grid needs 45 m
    CHECK_THROWS_AS(partially_clustered(1024, 15.0, kCenterNest, rng, huge),
                    std::runtime_error);
}

TEST_CASE("serialize_targets parses back exactly") {
    Rng rng(13);
    TargetField f = uniform_random(50, 15.0, rng);
    std::istringstream in(serialize_targets(f));
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(std::stod(line.substr(0, comma)) == f.targets[i].x);
        CHECK(std::stod(line.substr(comma + 1)) == f.targets[i].y);
        ++i;
    }
    CHECK(i == 50);
}
