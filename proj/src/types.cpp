#include "forage/types.hpp"

#include <cmath>
#include <stdexcept>

namespace forage {

std::string_view to_string(Mode m) {
    return m == Mode::CPFA ? "cpfa" : "mpfa";
}

Mode mode_from_string(std::string_view s) {
    if (s == "cpfa" || s == "CPFA") return Mode::CPFA;
    if (s == "mpfa" || s == "MPFA") return Mode::MPFA;
    throw std::invalid_argument("unknown mode: " + std::string(s));
}

std::vector<std::string> WorldConfig::validate() const {
    std::vector<std::string> out;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be positive");
    };
    positive(arena_side, "arena_side");
    positive(sim_minutes, "sim_minutes");
    positive(dt, "dt");
    positive(robot_speed, "robot_speed");
    positive(collision_radius, "collision_radius");
    positive(avoidance_step, "avoidance_step");
    positive(nest_radius, "nest_radius");
    positive(target_pickup_radius, "target_pickup_radius");
    positive(target_detect_radius, "target_detect_radius");
    positive(neighborhood_radius, "neighborhood_radius");
    if (n_robots < 1) out.push_back("n_robots must be at least 1");
    if (n_targets < 0) out.push_back("n_targets must be non-negative");
    if (dt > 1.0) out.push_back("dt must not exceed one second");
    return out;
}

int WorldConfig::ticks_per_second() const {
    return static_cast<int>(std::ceil(1.0 / dt - 1e-12));
}

long long WorldConfig::total_ticks() const {
    return std::llround(sim_minutes * 60.0 / dt);
}

double waypoint_strength(const PheromoneWaypoint& w, double now, double lambda_pd) {
    return std::exp(-lambda_pd * (now - w.created_at));
}

std::string_view to_string(Fsm s) {
    switch (s) {
        case Fsm::DepartNest: return "depart_nest";
        case Fsm::Travel: return "travel";
        case Fsm::SearchUninformed: return "search_uninformed";
        case Fsm::SearchInformed: return "search_informed";
        case Fsm::ReturnWithTarget: return "return_with_target";
        case Fsm::ReturnEmpty: return "return_empty";
        case Fsm::AvoidCollision: return "avoid_collision";
    }
    return "unknown";
}

}  // namespace forage
