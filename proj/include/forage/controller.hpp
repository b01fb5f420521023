#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "forage/geometry.hpp"
#include "forage/params.hpp"
#include "forage/poisson.hpp"
#include "forage/rng.hpp"
#include "forage/types.hpp"

namespace forage {

/// Everything a robot senses in one tick. Built by the world, consumed by the
/// pure controller.
struct Percepts {
    bool at_nest = false;
    int nearest_nest = 0;
    Vec2 nearest_nest_pos;

    /// Available targets within target_pickup_radius, ascending id.
    std::vector<int> targets_in_pickup;
    /// Position of targets_in_pickup.front(); meaningful only when non-empty.
    Vec2 pickup_pos;
    /// Additional available targets within neighborhood_radius of pickup_pos,
    /// excluding the pickup candidate itself.
    int k_neighbors = 0;

    /// Closest available target within target_detect_radius, if any.
    std::optional<Vec2> nearest_detected;
    /// Waypoint drawn from the current nest's list for a returning robot.
    std::optional<Vec2> waypoint_offer;
    /// True once per simulated second; gates p_search / p_return draws.
    bool decision_tick = false;
};

namespace act {
struct None {};
struct SetHeading {
    double theta;
};
struct MoveForward {
    double distance;
};
struct PickUp {
    int target;
};
struct Deposit {
    int nest;
};
struct LayPheromone {
    Vec2 location;
};
struct AdoptSite {
    Vec2 location;
};
}  // namespace act

using Action = std::variant<act::None, act::SetHeading, act::MoveForward, act::PickUp,
                            act::Deposit, act::LayPheromone, act::AdoptSite>;

/// At most three actions are ever emitted in one tick (e.g. pickup + the two
/// information decisions).
class ActionList {
public:
    void push(Action a);
    int size() const { return count_; }
    const Action* begin() const { return items_.data(); }
    const Action* end() const { return items_.data() + count_; }

private:
    std::array<Action, 3> items_{};
    int count_ = 0;
};

struct ControlOutput {
    RobotState state;
    ActionList actions;
};

/// True iff poisson_cdf(k, lambda) > u. Used at pickup time, once with
/// lambda_sf (adopt site fidelity) and once with lambda_lp (lay pheromone).
bool decide_information(int k, double lambda, double u);

/// Next correlated-random-walk heading: N(theta_prev, sigma) wrapped to
/// (-pi, pi]. Consumes one normal draw.
double crw_turn(double theta_prev, double sigma, Rng& rng);

/// Picks a waypoint with probability proportional to its current strength
/// e^(-lambda_pd * age); nullopt when the list is empty or all strengths
/// underflow to zero. Consumes one uniform draw iff the list is non-empty.
std::optional<Vec2> select_waypoint(const std::vector<PheromoneWaypoint>& waypoints, double now,
                                    double lambda_pd, Rng& rng);

/// One tick of the per-robot finite state machine. Pure: reads state and
/// percepts, returns the successor state and the actions for the world to
/// apply. Never mutates the world, never moves the robot itself.
ControlOutput controller_step(const RobotState& state, const Percepts& percepts,
                              const ParamSet& params, const WorldConfig& cfg, Rng& rng);

}  // namespace forage
