#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forage/geometry.hpp"

namespace forage {

enum class Mode { CPFA, MPFA };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

/// Layout constants of the partially clustered target distribution: one
/// large grid cluster, medium clusters of 16, remainder scattered.
struct ClusterLayout {
    double grid_spacing = 0.15;     // meters between grid neighbors
    double nest_clearance = 0.5;    // clusters may not come this close to a nest
    int medium_cluster_size = 16;   // 4x4
};

struct WorldConfig {
    Mode mode = Mode::CPFA;
    double arena_side = 15.0;  // meters, arena is [-side/2, side/2]^2
    int n_robots = 1;
    int n_targets = 0;
    double sim_minutes = 1.0;
    double dt = 0.1;  // seconds per tick

    double robot_speed = 0.16;           // m/s
    double collision_radius = 0.25;      // collision detected strictly below this
    double avoidance_step = 0.08;        // meters moved per avoidance maneuver
    double nest_radius = 0.25;           // robots within this of a nest center are "at" it
    double target_pickup_radius = 0.05;
    double target_detect_radius = 0.1;
    double neighborhood_radius = 0.3;  // local target density radius

    double pheromone_prune_threshold = 0.001;
    ClusterLayout cluster;

    std::uint64_t seed = 0;

    /// One message per violated invariant; empty means valid.
    std::vector<std::string> validate() const;

    int ticks_per_second() const;
    long long total_ticks() const;
};

enum class Fsm : std::uint8_t {
    DepartNest,
    Travel,
    SearchUninformed,
    SearchInformed,
    ReturnWithTarget,
    ReturnEmpty,
    AvoidCollision,
};

std::string_view to_string(Fsm s);

struct RobotState {
    int id = 0;
    Vec2 pose;
    double heading = 0.0;  // radians, normalized to (-pi, pi]
    Fsm fsm = Fsm::DepartNest;
    int home_nest = 0;
    int current_nest = 0;

    std::optional<int> carrying;
    double informed_timer = 0.0;  // seconds since informed search began
    std::optional<Vec2> remembered_site;

    double time_traveling = 0.0;
    double time_searching = 0.0;
    double time_avoiding = 0.0;
    double avoid_remaining = 0.0;  // meters left in the current avoidance maneuver

    // trip bookkeeping
    std::optional<Vec2> informed_destination;  // site/waypoint the current trip heads to
    Fsm resume_fsm = Fsm::Travel;              // state to restore after avoidance
    double resume_heading = 0.0;
    int collected = 0;  // deposits made by this robot
};

struct PheromoneWaypoint {
    Vec2 location;
    double created_at = 0.0;  // simulation clock, seconds
};

/// Strength of a waypoint of the given age: e^(-lambda_pd * age).
double waypoint_strength(const PheromoneWaypoint& w, double now, double lambda_pd);

struct Nest {
    int id = 0;
    Vec2 position;
    std::vector<PheromoneWaypoint> waypoints;
    long long collected = 0;
};

struct RobotMetrics {
    int targets_collected = 0;
    double collision_s = 0.0;
    double travel_s = 0.0;
    double search_s = 0.0;
};

struct Metrics {
    long long targets_collected = 0;
    double total_collision_s = 0.0;
    double total_travel_s = 0.0;
    double total_search_s = 0.0;
    std::vector<RobotMetrics> per_robot;
};

}  // namespace forage
