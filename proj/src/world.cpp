#include "forage/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "forage/targets.hpp"

namespace forage {

std::vector<Vec2> nest_positions(Mode mode, double arena_side) {
    if (mode == Mode::CPFA) return {Vec2{0.0, 0.0}};
    const double q = arena_side / 4.0;
    return {Vec2{-q, -q}, Vec2{q, -q}, Vec2{-q, q}, Vec2{q, q}};
}

int closest_nest(const Vec2& pos, const std::vector<Vec2>& nests) {
    if (nests.empty()) throw std::invalid_argument("closest_nest: no nests");
    int best = 0;
    double best_d = distance_sq(pos, nests[0]);
    for (int i = 1; i < static_cast<int>(nests.size()); ++i) {
        double d = distance_sq(pos, nests[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::pair<int, int>> detect_collisions(const std::vector<Vec2>& positions,
                                                   double radius) {
    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(positions.size());
    if (n < 2 || !(radius > 0.0)) return pairs;
    const double r2 = radius * radius;

    // Truncating cell coordinates to 32 bits can only merge far-apart cells
    // into one bucket; the exact distance test below rejects such impostors.
    auto key = [](long long cx, long long cy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
    };

    std::vector<std::pair<long long, long long>> coords(n);
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(n) * 2);
    for (int i = 0; i < n; ++i) {
        coords[i] = {static_cast<long long>(std::floor(positions[i].x / radius)),
                     static_cast<long long>(std::floor(positions[i].y / radius))};
        cells[key(coords[i].first, coords[i].second)].push_back(i);
    }

    auto emit = [&](int a, int b) {
        if (distance_sq(positions[a], positions[b]) < r2) {
            pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
    };

    // Each unordered cell pair is visited once: a cell against itself and
    // against four of its eight neighbors.
    static constexpr int kForward[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    for (const auto& [cell_key, members] : cells) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) emit(members[a], members[b]);
        }
        const auto [cx, cy] = coords[members.front()];
        for (const auto& d : kForward) {
            auto it = cells.find(key(cx + d[0], cy + d[1]));
            if (it == cells.end()) continue;
            for (int i : members) {
                for (int j : it->second) emit(i, j);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

std::vector<Vec2> ring_spawn_offsets(int count) {
    std::vector<Vec2> out;
    out.reserve(count);
    double radius = 0.5;
    while (static_cast<int>(out.size()) < count) {
        int capacity = static_cast<int>(std::floor(kTwoPi * radius / 0.3));
        for (int j = 0; j < capacity && static_cast<int>(out.size()) < count; ++j) {
            double a = kTwoPi * j / capacity;
            out.push_back(Vec2{radius * std::cos(a), radius * std::sin(a)});
        }
        radius += 0.3;
    }
    return out;
}

World::World(const WorldConfig& cfg, const ParamSet& params, std::uint64_t seed)
    : cfg_(cfg), params_(params) {
    auto cviol = cfg_.validate();
    if (!cviol.empty()) throw std::invalid_argument("invalid world config: " + cviol.front());
    auto pviol = validate_params(params_);
    if (!pviol.empty()) throw std::invalid_argument("invalid params: " + pviol.front());
    cfg_.seed = seed;

    // Arrival never undershoots: one tick of motion must not step across the
    // whole nest disc.
    nest_radius_ = std::max(cfg_.nest_radius, cfg_.robot_speed * cfg_.dt);
    nest_pos_ = nest_positions(cfg_.mode, cfg_.arena_side);
    nests_.resize(nest_pos_.size());
    for (int i = 0; i < static_cast<int>(nests_.size()); ++i) {
        nests_[i].id = i;
        nests_[i].position = nest_pos_[i];
    }

    const double h = cfg_.arena_side / 2.0;

    // Targets are generated in the corner frame [0, side]^2 and recentered.
    if (cfg_.n_targets > 0) {
        Rng target_rng(derive_seed(seed, 2, 0));
        std::vector<Vec2> corner_nests;
        corner_nests.reserve(nest_pos_.size());
        for (const Vec2& p : nest_pos_) corner_nests.push_back(p + Vec2{h, h});
        TargetField field =
            partially_clustered(cfg_.n_targets, cfg_.arena_side, corner_nests, target_rng,
                                cfg_.cluster);
        degraded_targets_ = field.degraded;
        targets_.reserve(field.targets.size());
        for (int i = 0; i < field.n(); ++i) {
            targets_.push_back(Target{i, field.targets[i] + Vec2{-h, -h}, true});
        }
    }
    available_ = static_cast<long long>(targets_.size());

    grid_cell_ = cfg_.neighborhood_radius;
    grid_dim_ = static_cast<int>(std::ceil(cfg_.arena_side / grid_cell_)) + 1;
    grid_.assign(static_cast<std::size_t>(grid_dim_) * grid_dim_, {});
    auto cell_index = [&](const Vec2& p) {
        int gx = std::clamp(static_cast<int>(std::floor((p.x + h) / grid_cell_)), 0, grid_dim_ - 1);
        int gy = std::clamp(static_cast<int>(std::floor((p.y + h) / grid_cell_)), 0, grid_dim_ - 1);
        return gy * grid_dim_ + gx;
    };
    for (const Target& t : targets_) grid_[cell_index(t.pos)].push_back(t.id);

    // Robots spawn on rings around their home nest (ids dealt round-robin
    // over nests) so nobody starts inside anyone's collision radius.
    const int n_nests = static_cast<int>(nest_pos_.size());
    std::vector<std::vector<Vec2>> per_nest(n_nests);
    for (int nidx = 0; nidx < n_nests; ++nidx) {
        int members = (cfg_.n_robots - nidx + n_nests - 1) / n_nests;
        per_nest[nidx] = ring_spawn_offsets(members);
    }
    robots_.resize(cfg_.n_robots);
    robot_rng_.reserve(cfg_.n_robots);
    for (int id = 0; id < cfg_.n_robots; ++id) {
        RobotState r;
        r.id = id;
        r.home_nest = id % n_nests;
        r.current_nest = r.home_nest;
        r.pose = nest_pos_[r.home_nest] + per_nest[r.home_nest][id / n_nests];
        if (std::abs(r.pose.x) > h || std::abs(r.pose.y) > h) {
            throw std::invalid_argument("too many robots for this arena");
        }
        r.heading = wrap_angle(bearing(nest_pos_[r.home_nest], r.pose));
        r.fsm = Fsm::DepartNest;
        robots_[id] = r;
        robot_rng_.emplace_back(derive_seed(seed, 1, static_cast<std::uint64_t>(id)));
    }
}

void World::gather_targets_within(const Vec2& p, double radius, std::vector<int>& out) const {
    out.clear();
    if (targets_.empty()) return;
    const double h = cfg_.arena_side / 2.0;
    const double r2 = radius * radius;
    int gx0 = std::clamp(static_cast<int>(std::floor((p.x - radius + h) / grid_cell_)), 0,
                         grid_dim_ - 1);
    int gx1 = std::clamp(static_cast<int>(std::floor((p.x + radius + h) / grid_cell_)), 0,
                         grid_dim_ - 1);
    int gy0 = std::clamp(static_cast<int>(std::floor((p.y - radius + h) / grid_cell_)), 0,
                         grid_dim_ - 1);
    int gy1 = std::clamp(static_cast<int>(std::floor((p.y + radius + h) / grid_cell_)), 0,
                         grid_dim_ - 1);
    for (int gy = gy0; gy <= gy1; ++gy) {
        for (int gx = gx0; gx <= gx1; ++gx) {
            for (int id : grid_[gy * grid_dim_ + gx]) {
                if (targets_[id].available && distance_sq(p, targets_[id].pos) <= r2) {
                    out.push_back(id);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
}

const Percepts& World::build_percepts(const RobotState& robot, Rng& rng) {
    Percepts& p = scratch_percepts_;
    p.targets_in_pickup.clear();
    p.nearest_detected.reset();
    p.waypoint_offer.reset();
    p.k_neighbors = 0;
    p.pickup_pos = Vec2{};

    p.nearest_nest = closest_nest(robot.pose, nest_pos_);
    p.nearest_nest_pos = nest_pos_[p.nearest_nest];
    p.at_nest = distance(robot.pose, p.nearest_nest_pos) <= nest_radius_;
    p.decision_tick = tick_ % cfg_.ticks_per_second() == 0;

    const bool senses_targets = robot.fsm == Fsm::Travel || robot.fsm == Fsm::SearchUninformed ||
                                robot.fsm == Fsm::SearchInformed;
    if (senses_targets && !targets_.empty()) {
        double sense_r = std::max(cfg_.target_detect_radius, cfg_.target_pickup_radius);
        gather_targets_within(robot.pose, sense_r, scratch_ids_);
        double best_d = std::numeric_limits<double>::infinity();
        int best = -1;
        for (int t : scratch_ids_) {
            double d = distance(robot.pose, targets_[t].pos);
            if (d <= cfg_.target_pickup_radius) p.targets_in_pickup.push_back(t);
            if (d <= cfg_.target_detect_radius && d < best_d) {
                best_d = d;
                best = t;
            }
        }
        if (best >= 0) p.nearest_detected = targets_[best].pos;
        if (!p.targets_in_pickup.empty()) {
            int candidate = p.targets_in_pickup.front();
            p.pickup_pos = targets_[candidate].pos;
            gather_targets_within(p.pickup_pos, cfg_.neighborhood_radius, scratch_ids_);
            for (int t : scratch_ids_) {
                if (t != candidate) ++p.k_neighbors;
            }
        }
    }

    if ((robot.fsm == Fsm::ReturnWithTarget || robot.fsm == Fsm::ReturnEmpty) && p.at_nest &&
        !robot.remembered_site) {
        p.waypoint_offer =
            select_waypoint(nests_[p.nearest_nest].waypoints, clock_, params_.lambda_pd, rng);
    }
    return p;
}

void World::move_robot(RobotState& robot, double dist) {
    if (dist <= 0.0) return;
    const double h = cfg_.arena_side / 2.0;
    Vec2 dir = heading_vec(robot.heading);
    Vec2 np = robot.pose + dir * dist;
    bool flip_x = false, flip_y = false;
    if (np.x < -h) {
        np.x = -h;
        flip_x = true;
    } else if (np.x > h) {
        np.x = h;
        flip_x = true;
    }
    if (np.y < -h) {
        np.y = -h;
        flip_y = true;
    } else if (np.y > h) {
        np.y = h;
        flip_y = true;
    }
    if (flip_x || flip_y) {
        if (flip_x) dir.x = -dir.x;
        if (flip_y) dir.y = -dir.y;
        robot.heading = wrap_angle(std::atan2(dir.y, dir.x));
    }
    robot.pose = np;
}

void World::apply_actions(int robot_id, const ActionList& actions) {
    RobotState& r = robots_[robot_id];
    for (const Action& a : actions) {
        if (const auto* sh = std::get_if<act::SetHeading>(&a)) {
            r.heading = wrap_angle(sh->theta);
        } else if (const auto* mv = std::get_if<act::MoveForward>(&a)) {
            move_robot(r, mv->distance);
        } else if (const auto* pu = std::get_if<act::PickUp>(&a)) {
            if (pu->target < 0 || pu->target >= static_cast<int>(targets_.size())) {
                throw SimulationFault("pickup of nonexistent target id " +
                                      std::to_string(pu->target));
            }
            Target& t = targets_[pu->target];
            if (!t.available) {
                throw SimulationFault("pickup of unavailable target id " +
                                      std::to_string(pu->target));
            }
            if (distance(r.pose, t.pos) > cfg_.target_pickup_radius + 1e-9) {
                throw SimulationFault("pickup out of range by robot " + std::to_string(robot_id));
            }
            t.available = false;
            --available_;
            ++carried_;
        } else if (const auto* dp = std::get_if<act::Deposit>(&a)) {
            if (dp->nest < 0 || dp->nest >= static_cast<int>(nests_.size())) {
                throw SimulationFault("deposit at nonexistent nest " + std::to_string(dp->nest));
            }
            if (distance(r.pose, nest_pos_[dp->nest]) > nest_radius_ + 1e-9) {
                throw SimulationFault("deposit away from nest by robot " +
                                      std::to_string(robot_id));
            }
            if (carried_ <= 0) throw SimulationFault("deposit while nothing is carried");
            ++nests_[dp->nest].collected;
            ++deposited_;
            --carried_;
            events_.push_back(CollectionEvent{clock_, robot_id, dp->nest});
        } else if (const auto* lp = std::get_if<act::LayPheromone>(&a)) {
            int nidx = closest_nest(lp->location, nest_pos_);
            nests_[nidx].waypoints.push_back(PheromoneWaypoint{lp->location, clock_});
        }
        // act::AdoptSite mutates only controller state; act::None is a no-op.
    }
}

void World::resolve_collision(RobotState& robot, const Vec2& other_pos) {
    robot.resume_fsm = robot.fsm;
    robot.resume_heading = robot.heading;
    double side = cross(heading_vec(robot.heading), other_pos - robot.pose);
    // Positive cross: the other robot is to the left, so dodge right; on the
    // right or dead ahead, dodge left.
    double turn = side > 0.0 ? -kPi / 2.0 : kPi / 2.0;
    robot.heading = wrap_angle(robot.heading + turn);
    robot.fsm = Fsm::AvoidCollision;
    robot.avoid_remaining = cfg_.avoidance_step;
}

void World::step() {
    // (1) Pheromones decay lazily; prune the ones below threshold.
    for (Nest& nest : nests_) {
        std::erase_if(nest.waypoints, [&](const PheromoneWaypoint& w) {
            return waypoint_strength(w, clock_, params_.lambda_pd) <
                   cfg_.pheromone_prune_threshold;
        });
    }

    // (2) Controller pass in robot id order; actions apply immediately so a
    // picked-up target is gone before the next robot senses. Time accrues to
    // the state the robot was in when the tick began.
    for (int id = 0; id < static_cast<int>(robots_.size()); ++id) {
        const Fsm pre = robots_[id].fsm;
        const Percepts& percepts = build_percepts(robots_[id], robot_rng_[id]);
        ControlOutput out = controller_step(robots_[id], percepts, params_, cfg_, robot_rng_[id]);
        robots_[id] = out.state;
        apply_actions(id, out.actions);
        switch (pre) {
            case Fsm::SearchUninformed:
            case Fsm::SearchInformed:
                robots_[id].time_searching += cfg_.dt;
                break;
            case Fsm::AvoidCollision:
                robots_[id].time_avoiding += cfg_.dt;
                break;
            default:
                robots_[id].time_traveling += cfg_.dt;
                break;
        }
    }

    // (3) Collision detection on the settled positions; both members of a
    // fresh pair start an avoidance maneuver.
    std::vector<Vec2> pos(robots_.size());
    for (std::size_t i = 0; i < robots_.size(); ++i) pos[i] = robots_[i].pose;
    for (const auto& [i, j] : detect_collisions(pos, cfg_.collision_radius)) {
        if (robots_[i].fsm != Fsm::AvoidCollision) resolve_collision(robots_[i], pos[j]);
        if (robots_[j].fsm != Fsm::AvoidCollision) resolve_collision(robots_[j], pos[i]);
    }

    clock_ += cfg_.dt;
    ++tick_;
    check_invariants();
}

void World::run(const std::function<void(const World&)>& per_tick) {
    while (!done()) {
        step();
        if (per_tick) per_tick(*this);
    }
}

Metrics World::metrics() const {
    Metrics m;
    m.per_robot.reserve(robots_.size());
    for (const RobotState& r : robots_) {
        RobotMetrics rm;
        rm.targets_collected = r.collected;
        rm.collision_s = r.time_avoiding;
        rm.travel_s = r.time_traveling;
        rm.search_s = r.time_searching;
        m.total_collision_s += rm.collision_s;
        m.total_travel_s += rm.travel_s;
        m.total_search_s += rm.search_s;
        m.per_robot.push_back(rm);
    }
    for (const Nest& n : nests_) m.targets_collected += n.collected;
    return m;
}

void World::check_invariants() const {
    if (available_ + carried_ + deposited_ != static_cast<long long>(targets_.size())) {
        throw SimulationFault("target conservation violated at tick " + std::to_string(tick_));
    }
    long long nest_sum = 0;
    for (const Nest& n : nests_) nest_sum += n.collected;
    if (nest_sum != deposited_) {
        throw SimulationFault("nest deposit ledger mismatch at tick " + std::to_string(tick_));
    }
    const double h = cfg_.arena_side / 2.0 + 1e-9;
    for (const RobotState& r : robots_) {
        if (std::abs(r.pose.x) > h || std::abs(r.pose.y) > h) {
            throw SimulationFault("robot " + std::to_string(r.id) + " left the arena");
        }
        bool carrying = r.carrying.has_value();
        bool returning = r.fsm == Fsm::ReturnWithTarget ||
                         (r.fsm == Fsm::AvoidCollision && r.resume_fsm == Fsm::ReturnWithTarget);
        if (carrying != returning) {
            throw SimulationFault("carry/state mismatch for robot " + std::to_string(r.id));
        }
    }
}

Metrics run_replicate(const WorldConfig& cfg, const ParamSet& params, std::uint64_t seed,
                      const std::function<void(const World&)>& per_tick) {
    World world(cfg, params, seed);
    world.run(per_tick);
    return world.metrics();
}

}  // namespace forage
