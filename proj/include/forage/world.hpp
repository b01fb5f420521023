#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "forage/controller.hpp"
#include "forage/geometry.hpp"
#include "forage/params.hpp"
#include "forage/rng.hpp"
#include "forage/types.hpp"

namespace forage {

/// Raised when the world reaches an inconsistent state (e.g. a pickup of an
/// unavailable target). Aborts the replicate; the harness records the fault.
class SimulationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Target {
    int id = 0;
    Vec2 pos;
    bool available = true;
};

struct CollectionEvent {
    double time = 0.0;
    int robot = 0;
    int nest = 0;
};

/// Nest layout in the origin-centered frame: CPFA one nest at the center,
/// MPFA the four quadrant centers in the fixed order (-q,-q), (q,-q),
/// (-q,q), (q,q) with q = arena_side/4.
std::vector<Vec2> nest_positions(Mode mode, double arena_side);

/// Index of the Euclidean-nearest nest; ties go to the lowest index.
int closest_nest(const Vec2& pos, const std::vector<Vec2>& nests);

/// All unordered pairs with center distance strictly below `radius`, found
/// with a uniform grid hash (cell size = radius). Pairs come back sorted as
/// (low, high) for deterministic downstream iteration.
std::vector<std::pair<int, int>> detect_collisions(const std::vector<Vec2>& positions,
                                                   double radius);

/// Deterministic spawn offsets around a nest: concentric rings starting at
/// 0.5 m with 0.3 m ring gap and roughly 0.3 m arc spacing, so no two robots
/// begin within collision range.
std::vector<Vec2> ring_spawn_offsets(int count);

class World {
public:
    World(const WorldConfig& cfg, const ParamSet& params, std::uint64_t seed);

    /// One simulation tick: decay pheromones, step every robot through the
    /// controller in id order, apply actions, resolve collisions, accrue
    /// per-state time, advance the clock.
    void step();

    /// Runs to the configured horizon; the hook (if any) fires after every
    /// tick.
    void run(const std::function<void(const World&)>& per_tick = {});

    bool done() const { return tick_ >= cfg_.total_ticks(); }
    long long tick() const { return tick_; }
    double clock() const { return clock_; }
    const WorldConfig& config() const { return cfg_; }
    const std::vector<Nest>& nests() const { return nests_; }
    const std::vector<RobotState>& robots() const { return robots_; }
    const std::vector<Target>& targets() const { return targets_; }
    const std::vector<CollectionEvent>& events() const { return events_; }
    bool degraded_targets() const { return degraded_targets_; }

    long long available_count() const { return available_; }
    long long carried_count() const { return carried_; }
    long long deposited_count() const { return deposited_; }

    Metrics metrics() const;

    /// Throws SimulationFault if conservation or containment is violated.
    void check_invariants() const;

private:
    const Percepts& build_percepts(const RobotState& robot, Rng& rng);
    void apply_actions(int robot_id, const ActionList& actions);
    void move_robot(RobotState& robot, double dist);
    void resolve_collision(RobotState& robot, const Vec2& other_pos);
    void gather_targets_within(const Vec2& p, double radius, std::vector<int>& out) const;

    WorldConfig cfg_;
    ParamSet params_;
    double nest_radius_ = 0.0;  // at-nest test distance

    std::vector<Nest> nests_;
    std::vector<Vec2> nest_pos_;
    std::vector<RobotState> robots_;
    std::vector<Rng> robot_rng_;
    std::vector<Target> targets_;
    bool degraded_targets_ = false;

    // fixed uniform grid over target positions, cell = neighborhood_radius
    int grid_dim_ = 0;
    double grid_cell_ = 0.0;
    std::vector<std::vector<int>> grid_;

    long long tick_ = 0;
    double clock_ = 0.0;
    long long available_ = 0;
    long long carried_ = 0;
    long long deposited_ = 0;
    std::vector<CollectionEvent> events_;

    mutable std::vector<int> scratch_ids_;
    Percepts scratch_percepts_;
};

/// Builds, runs, and summarizes one world. SimulationFault propagates to the
/// caller; the harness turns it into a recorded replicate fault.
Metrics run_replicate(const WorldConfig& cfg, const ParamSet& params, std::uint64_t seed,
                      const std::function<void(const World&)>& per_tick = {});

}  // namespace forage
