#include "forage/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace forage {

void ActionList::push(Action a) {
    if (count_ >= static_cast<int>(items_.size())) {
        throw std::length_error("ActionList: more than three actions in one tick");
    }
    items_[count_++] = std::move(a);
}

bool decide_information(int k, double lambda, double u) {
    return poisson_cdf(k, lambda) > u;
}

double crw_turn(double theta_prev, double sigma, Rng& rng) {
    return wrap_angle(rng.normal(theta_prev, sigma));
}

std::optional<Vec2> select_waypoint(const std::vector<PheromoneWaypoint>& waypoints, double now,
                                    double lambda_pd, Rng& rng) {
    if (waypoints.empty()) return std::nullopt;
    double total = 0.0;
    for (const auto& w : waypoints) total += waypoint_strength(w, now, lambda_pd);
    if (!(total > 0.0)) return std::nullopt;

    double pick = rng.uniform() * total;
    double cum = 0.0;
    for (const auto& w : waypoints) {
        cum += waypoint_strength(w, now, lambda_pd);
        if (pick < cum) return w.location;
    }
    return waypoints.back().location;  // guard against accumulated rounding
}

namespace {

void emit_move(ControlOutput& out, double heading, double dist) {
    out.state.heading = heading;
    out.actions.push(act::SetHeading{heading});
    out.actions.push(act::MoveForward{dist});
}

/// Shared by SearchUninformed and SearchInformed (the fsm field tells them
/// apart). Assumes out.state.fsm is already one of the two search states.
void search_behavior(ControlOutput& out, const Percepts& percepts, const ParamSet& params,
                     const WorldConfig& cfg, Rng& rng) {
    RobotState& s = out.state;
    const double step = cfg.robot_speed * cfg.dt;
    const bool informed = s.fsm == Fsm::SearchInformed;

    if (!percepts.targets_in_pickup.empty()) {
        // Grab the target and make the two information decisions on the same
        // local density k. The robot stands still while handling the target.
        int target = percepts.targets_in_pickup.front();
        out.actions.push(act::PickUp{target});
        s.carrying = target;
        bool keep_site = decide_information(percepts.k_neighbors, params.lambda_sf, rng.uniform());
        bool lay = decide_information(percepts.k_neighbors, params.lambda_lp, rng.uniform());
        if (keep_site) {
            s.remembered_site = percepts.pickup_pos;
            out.actions.push(act::AdoptSite{percepts.pickup_pos});
        }
        if (lay) out.actions.push(act::LayPheromone{percepts.pickup_pos});
        s.fsm = Fsm::ReturnWithTarget;
        return;
    }

    if (percepts.nearest_detected) {
        // Home in on a detected target; no give-up draw while closing in.
        if (informed) s.informed_timer += cfg.dt;
        emit_move(out, wrap_angle(bearing(s.pose, *percepts.nearest_detected)), step);
        return;
    }

    if (percepts.decision_tick && rng.uniform() < params.p_return) {
        // Give up. If the robot happens to be on a nest already it stands
        // still for this tick; return_behavior completes the arrival next
        // tick with fresh percepts (including any waypoint offer).
        s.fsm = Fsm::ReturnEmpty;
        if (!percepts.at_nest) {
            emit_move(out, wrap_angle(bearing(s.pose, percepts.nearest_nest_pos)), step);
        }
        return;
    }

    double sigma = informed ? informed_sigma(params.omega, params.lambda_id, s.informed_timer)
                            : params.omega;
    if (informed) s.informed_timer += cfg.dt;
    emit_move(out, crw_turn(s.heading, sigma, rng), step);
}

/// Shared by ReturnWithTarget and ReturnEmpty.
void return_behavior(ControlOutput& out, const Percepts& percepts, const WorldConfig& cfg) {
    RobotState& s = out.state;
    const double step = cfg.robot_speed * cfg.dt;

    if (!percepts.at_nest) {
        emit_move(out, wrap_angle(bearing(s.pose, percepts.nearest_nest_pos)), step);
        return;
    }

    if (s.fsm == Fsm::ReturnWithTarget) {
        out.actions.push(act::Deposit{percepts.nearest_nest});
        s.carrying.reset();
        s.collected += 1;
    }
    s.current_nest = percepts.nearest_nest;
    s.informed_timer = 0.0;

    // Next trip: private site memory beats the nest's shared waypoints.
    if (s.remembered_site) {
        s.informed_destination = s.remembered_site;
        s.remembered_site.reset();
    } else if (percepts.waypoint_offer) {
        s.informed_destination = percepts.waypoint_offer;
    } else {
        s.informed_destination.reset();
    }
    s.fsm = Fsm::DepartNest;
}

}  // namespace

ControlOutput controller_step(const RobotState& state, const Percepts& percepts,
                              const ParamSet& params, const WorldConfig& cfg, Rng& rng) {
    ControlOutput out;
    out.state = state;
    RobotState& s = out.state;
    const double step = cfg.robot_speed * cfg.dt;

    switch (s.fsm) {
        case Fsm::AvoidCollision: {
            double d = std::min(step, s.avoid_remaining);
            s.avoid_remaining -= d;
            out.actions.push(act::MoveForward{d});
            if (s.avoid_remaining <= 1e-12) {
                s.avoid_remaining = 0.0;
                s.fsm = s.resume_fsm;
                s.heading = s.resume_heading;
                out.actions.push(act::SetHeading{s.heading});
            }
            return out;
        }

        case Fsm::DepartNest: {
            double heading = s.informed_destination
                                 ? wrap_angle(bearing(s.pose, *s.informed_destination))
                                 : rng.uniform(-kPi, kPi);
            s.fsm = Fsm::Travel;
            emit_move(out, heading, step);
            return out;
        }

        case Fsm::Travel: {
            if (s.informed_destination) {
                Vec2 dest = *s.informed_destination;
                if (distance(s.pose, dest) <= step) {
                    // Arrived: informed search starts here and now.
                    s.informed_destination.reset();
                    s.informed_timer = 0.0;
                    s.fsm = Fsm::SearchInformed;
                    search_behavior(out, percepts, params, cfg, rng);
                } else {
                    emit_move(out, wrap_angle(bearing(s.pose, dest)), step);
                }
                return out;
            }
            if (percepts.decision_tick && rng.uniform() < params.p_search) {
                s.fsm = Fsm::SearchUninformed;
                search_behavior(out, percepts, params, cfg, rng);
                return out;
            }
            out.actions.push(act::MoveForward{step});
            return out;
        }

        case Fsm::SearchUninformed:
        case Fsm::SearchInformed:
            search_behavior(out, percepts, params, cfg, rng);
            return out;

        case Fsm::ReturnWithTarget:
        case Fsm::ReturnEmpty:
            return_behavior(out, percepts, cfg);
            return out;
    }
    throw std::logic_error("controller_step: unhandled fsm state");
}

}  // namespace forage
