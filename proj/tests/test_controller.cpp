#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "forage/controller.hpp"

using namespace forage;

namespace {

WorldConfig desk_config() {
    WorldConfig cfg;
    cfg.n_robots = 1;
    cfg.n_targets = 0;
    return cfg;
}

ParamSet quiet_params() {
    // Deterministic skeleton: never starts searching, never gives up, CRW
    // degenerates to a straight line.
    ParamSet p;
    p.p_search = 0.0;
    p.p_return = 0.0;
    p.omega = 0.0;
    p.lambda_id = 1.0;
    p.lambda_sf = 0.0;
    p.lambda_lp = 0.0;
    p.lambda_pd = 0.01;
    return p;
}

template <class A>
const A* find_action(const ActionList& actions) {
    for (const Action& a : actions) {
        if (const A* hit = std::get_if<A>(&a)) return hit;
    }
    return nullptr;
}

template <class A>
int count_actions(const ActionList& actions) {
    int n = 0;
    for (const Action& a : actions) {
        if (std::holds_alternative<A>(a)) ++n;
    }
    return n;
}

const double kStep = 0.16 * 0.1;

}  // namespace

TEST_CASE("decide_information thresholds at the poisson cdf") {
    CHECK(decide_information(0, 0.0, 0.999));            // cdf = 1 beats any u < 1
    CHECK(!decide_information(0, 20.0, 0.5));            // cdf = e^-20, tiny
    CHECK(decide_information(30, 20.0, 0.5));            // rich neighborhood
    // Monotone in k: once true, stays true as k grows.
    bool prev = false;
    for (int k = 0; k < 40; ++k) {
        bool now = decide_information(k, 8.0, 0.6);
        if (prev) CHECK(now);
        prev = now;
    }
}

TEST_CASE("crw_turn with zero sigma keeps the heading") {
    Rng rng(4);
    CHECK(crw_turn(0.7, 0.0, rng) == doctest::Approx(0.7));
    CHECK(crw_turn(-3.0, 0.0, rng) == doctest::Approx(-3.0));
    // Output is always a normalized angle.
    Rng rng2(5);
    for (int i = 0; i < 1000; ++i) {
        double h = crw_turn(3.0, 2.5, rng2);
        CHECK(h > -kPi);
        CHECK(h <= kPi);
    }
}

TEST_CASE("select_waypoint draws proportionally to strength") {
    // Strengths 1 and 1/4: expect picks in an 0.8 / 0.2 split.
    const double lambda_pd = std::log(4.0);
    std::vector<PheromoneWaypoint> wps = {{{1.0, 0.0}, 10.0}, {{2.0, 0.0}, 9.0}};
    Rng rng(123);
    int first = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto pick = select_waypoint(wps, 10.0, lambda_pd, rng);
        REQUIRE(pick.has_value());
        if (pick->x == 1.0) ++first;
    }
    CHECK(first / static_cast<double>(n) == doctest::Approx(0.8).epsilon(0.025));

    // Empty list: no draw, no result.
    Rng before(7), after(7);
    CHECK(!select_waypoint({}, 0.0, 1.0, before).has_value());
    CHECK(before.uniform() == after.uniform());

    // Fully decayed list returns nothing (but still consumes no draw).
    std::vector<PheromoneWaypoint> stale = {{{1.0, 0.0}, 0.0}};
    CHECK(!select_waypoint(stale, 1e6, 10.0, before).has_value());
}

TEST_CASE("ActionList caps at three actions") {
    ActionList list;
    list.push(act::None{});
    list.push(act::None{});
    list.push(act::None{});
    CHECK(list.size() == 3);
    CHECK_THROWS_AS(list.push(act::None{}), std::length_error);
}

TEST_CASE("DepartNest picks a heading and starts traveling") {
    WorldConfig cfg = desk_config();
    RobotState s;
    s.fsm = Fsm::DepartNest;
    s.pose = {0.0, 0.0};
    Percepts p;

    SUBCASE("informed trips head straight for the destination") {
        s.informed_destination = Vec2{3.0, 4.0};
        Rng rng(1);
        ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::Travel);
        CHECK(out.state.heading == doctest::Approx(std::atan2(4.0, 3.0)));
        const auto* mv = find_action<act::MoveForward>(out.actions);
        REQUIRE(mv != nullptr);
        CHECK(mv->distance == doctest::Approx(kStep));
        CHECK(out.state.informed_destination.has_value());  // consumed only on arrival
    }

    SUBCASE("uninformed trips draw a uniform heading") {
        Rng rng(1), ref(1);
        ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::Travel);
        CHECK(out.state.heading == doctest::Approx(ref.uniform(-kPi, kPi)));
    }
}

TEST_CASE("Travel moves straight until the search coin comes up") {
    WorldConfig cfg = desk_config();
    RobotState s;
    s.fsm = Fsm::Travel;
    s.heading = 1.0;
    Percepts p;

    SUBCASE("plain ticks move without consuming randomness") {
        Rng rng(9), ref(9);
        p.decision_tick = false;
        ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::Travel);
        CHECK(out.state.heading == 1.0);
        CHECK(out.actions.size() == 1);
        CHECK(find_action<act::MoveForward>(out.actions) != nullptr);
        CHECK(rng.uniform() == ref.uniform());  // no draw was consumed
    }

    SUBCASE("decision tick with p_search = 1 starts searching the same tick") {
        ParamSet params = quiet_params();
        params.p_search = 1.0;
        params.omega = 0.5;
        p.decision_tick = true;
        Rng rng(9);
        ControlOutput out = controller_step(s, p, params, cfg, rng);
        CHECK(out.state.fsm == Fsm::SearchUninformed);
        CHECK(find_action<act::MoveForward>(out.actions) != nullptr);  // CRW step
    }

    SUBCASE("decision tick with p_search = 0 never switches") {
        p.decision_tick = true;
        Rng rng(9);
        ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::Travel);
    }
}

TEST_CASE("informed travel declares arrival within one step") {
    WorldConfig cfg = desk_config();
    ParamSet params = quiet_params();
    RobotState s;
    s.fsm = Fsm::Travel;
    s.pose = {0.0, 0.0};
    s.informed_destination = Vec2{0.01, 0.0};  // closer than one 0.016 m step
    s.informed_timer = 99.0;                   // stale junk; must reset on arrival
    Percepts p;
    Rng rng(3);
    ControlOutput out = controller_step(s, p, params, cfg, rng);
    CHECK(out.state.fsm == Fsm::SearchInformed);
    CHECK(!out.state.informed_destination.has_value());
    // Timer was reset before the first informed step, then advanced by dt.
    CHECK(out.state.informed_timer == doctest::Approx(cfg.dt));
    // The first informed CRW step uses sigma = informed_sigma(omega, ., 0) = 2pi.
    CHECK(find_action<act::MoveForward>(out.actions) != nullptr);

    // Far away: keep heading toward the destination.
    s.informed_destination = Vec2{5.0, 0.0};
    ControlOutput far = controller_step(s, p, params, cfg, rng);
    CHECK(far.state.fsm == Fsm::Travel);
    CHECK(far.state.heading == doctest::Approx(0.0));
}

TEST_CASE("search picks up a target and decides what to remember") {
    WorldConfig cfg = desk_config();
    RobotState s;
    s.fsm = Fsm::SearchUninformed;
    s.pose = {2.0, 2.0};
    Percepts p;
    p.targets_in_pickup = {42};
    p.pickup_pos = {2.01, 2.0};
    p.k_neighbors = 5;

    SUBCASE("lambda = 0 makes both information decisions certain") {
        ParamSet params = quiet_params();  // lambda_sf = lambda_lp = 0
        Rng rng(8);
        ControlOutput out = controller_step(s, p, params, cfg, rng);
        CHECK(out.state.fsm == Fsm::ReturnWithTarget);
        REQUIRE(out.state.carrying.has_value());
        CHECK(*out.state.carrying == 42);
        CHECK(find_action<act::PickUp>(out.actions)->target == 42);
        REQUIRE(out.state.remembered_site.has_value());
        CHECK(*out.state.remembered_site == p.pickup_pos);
        CHECK(find_action<act::AdoptSite>(out.actions) != nullptr);
        CHECK(find_action<act::LayPheromone>(out.actions)->location == p.pickup_pos);
        CHECK(out.actions.size() == 3);
        // Picking up happens standing still.
        CHECK(find_action<act::MoveForward>(out.actions) == nullptr);
    }

    SUBCASE("huge lambda suppresses both decisions at k = 5") {
        ParamSet params = quiet_params();
        params.lambda_sf = 20.0;
        params.lambda_lp = 20.0;
        Rng rng(8);
        ControlOutput out = controller_step(s, p, params, cfg, rng);
        CHECK(out.state.fsm == Fsm::ReturnWithTarget);
        CHECK(!out.state.remembered_site.has_value());
        CHECK(find_action<act::AdoptSite>(out.actions) == nullptr);
        CHECK(find_action<act::LayPheromone>(out.actions) == nullptr);
        CHECK(out.actions.size() == 1);
    }
}

TEST_CASE("search homes in on a detected target without give-up draws") {
    WorldConfig cfg = desk_config();
    ParamSet params = quiet_params();
    params.p_return = 1.0;  // would give up immediately if the draw happened
    RobotState s;
    s.fsm = Fsm::SearchUninformed;
    s.pose = {1.0, 1.0};
    Percepts p;
    p.nearest_detected = Vec2{1.0, 1.08};
    p.decision_tick = true;
    Rng rng(6);
    ControlOutput out = controller_step(s, p, params, cfg, rng);
    CHECK(out.state.fsm == Fsm::SearchUninformed);
    CHECK(out.state.heading == doctest::Approx(kPi / 2));
}

TEST_CASE("give-up coin sends the robot home") {
    WorldConfig cfg = desk_config();
    ParamSet params = quiet_params();
    params.p_return = 1.0;
    RobotState s;
    s.fsm = Fsm::SearchUninformed;
    s.pose = {1.0, 0.0};
    Percepts p;
    p.decision_tick = true;
    p.nearest_nest_pos = {0.0, 0.0};

    Rng rng(2);
    ControlOutput out = controller_step(s, p, params, cfg, rng);
    CHECK(out.state.fsm == Fsm::ReturnEmpty);
    CHECK(out.state.heading == doctest::Approx(kPi));

    // Off the decision grid the coin is never tossed.
    p.decision_tick = false;
    ControlOutput keep = controller_step(s, p, params, cfg, rng);
    CHECK(keep.state.fsm == Fsm::SearchUninformed);

    // Giving up while standing on the nest: no movement this tick.
    p.decision_tick = true;
    p.at_nest = true;
    ControlOutput stand = controller_step(s, p, params, cfg, rng);
    CHECK(stand.state.fsm == Fsm::ReturnEmpty);
    CHECK(find_action<act::MoveForward>(stand.actions) == nullptr);
}

TEST_CASE("returning robots re-aim at the nearest nest every tick") {
    WorldConfig cfg = desk_config();
    RobotState s;
    s.fsm = Fsm::ReturnWithTarget;
    s.carrying = 3;
    s.pose = {5.0, 5.0};
    Percepts p;
    p.nearest_nest = 3;
    p.nearest_nest_pos = {3.75, 3.75};
    Rng rng(1);
    ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
    CHECK(out.state.fsm == Fsm::ReturnWithTarget);
    CHECK(out.state.heading == doctest::Approx(std::atan2(-1.25, -1.25)));
    CHECK(find_action<act::Deposit>(out.actions) == nullptr);
}

TEST_CASE("arrival at a nest deposits and plans the next trip") {
    WorldConfig cfg = desk_config();
    RobotState s;
    s.fsm = Fsm::ReturnWithTarget;
    s.carrying = 9;
    s.collected = 4;
    s.informed_timer = 3.0;
    s.pose = {3.7, 3.7};
    Percepts p;
    p.at_nest = true;
    p.nearest_nest = 2;
    p.nearest_nest_pos = {3.75, 3.75};

    SUBCASE("site fidelity wins over a waypoint offer") {
        RobotState t = s;
        t.remembered_site = Vec2{9.0, 9.0};
        Percepts q = p;
        q.waypoint_offer = Vec2{1.0, 1.0};
        Rng rng(5);
        ControlOutput out = controller_step(t, q, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::DepartNest);
        CHECK(find_action<act::Deposit>(out.actions)->nest == 2);
        CHECK(!out.state.carrying.has_value());
        CHECK(out.state.collected == 5);
        CHECK(out.state.current_nest == 2);
        CHECK(out.state.informed_timer == 0.0);
        REQUIRE(out.state.informed_destination.has_value());
        CHECK(*out.state.informed_destination == Vec2{9.0, 9.0});
        CHECK(!out.state.remembered_site.has_value());  // one-shot memory
        CHECK(find_action<act::MoveForward>(out.actions) == nullptr);
    }

    SUBCASE("waypoint offer is adopted when no private site exists") {
        Percepts q = p;
        q.waypoint_offer = Vec2{1.0, 1.0};
        Rng rng(5);
        ControlOutput out = controller_step(s, q, quiet_params(), cfg, rng);
        REQUIRE(out.state.informed_destination.has_value());
        CHECK(*out.state.informed_destination == Vec2{1.0, 1.0});
    }

    SUBCASE("no memory, no offer: next trip is uninformed") {
        Rng rng(5);
        ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
        CHECK(!out.state.informed_destination.has_value());
    }

    SUBCASE("empty-handed arrival does not deposit") {
        RobotState t = s;
        t.fsm = Fsm::ReturnEmpty;
        t.carrying.reset();
        Rng rng(5);
        ControlOutput out = controller_step(t, p, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::DepartNest);
        CHECK(find_action<act::Deposit>(out.actions) == nullptr);
        CHECK(out.state.collected == 4);
    }
}

TEST_CASE("collision avoidance runs its distance then restores the trip") {
    WorldConfig cfg = desk_config();
    RobotState s;
    s.fsm = Fsm::AvoidCollision;
    s.resume_fsm = Fsm::ReturnWithTarget;
    s.resume_heading = 0.25;
    s.heading = 0.25 + kPi / 2;
    s.carrying = 1;
    s.avoid_remaining = 0.08;
    Percepts p;
    Rng rng(1);

    // 0.08 m at 0.016 m per tick: four full ticks plus the final one.
    for (int tick = 0; tick < 4; ++tick) {
        ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
        CHECK(out.state.fsm == Fsm::AvoidCollision);
        CHECK(find_action<act::MoveForward>(out.actions)->distance == doctest::Approx(kStep));
        s = out.state;
    }
    CHECK(s.avoid_remaining == doctest::Approx(0.016));
    ControlOutput out = controller_step(s, p, quiet_params(), cfg, rng);
    CHECK(out.state.fsm == Fsm::ReturnWithTarget);
    CHECK(out.state.heading == 0.25);
    CHECK(out.state.avoid_remaining == 0.0);
    CHECK(find_action<act::SetHeading>(out.actions)->theta == 0.25);
    // The maneuver never overshoots its 0.08 m budget.
    CHECK(find_action<act::MoveForward>(out.actions)->distance == doctest::Approx(kStep));
}

TEST_CASE("the controller is mode-blind: CPFA and MPFA share every branch") {
    WorldConfig cpfa = desk_config();
    cpfa.mode = Mode::CPFA;
    WorldConfig mpfa = desk_config();
    mpfa.mode = Mode::MPFA;

    RobotState s;
    s.fsm = Fsm::SearchUninformed;
    s.heading = 0.4;
    Percepts p;
    p.decision_tick = true;
    ParamSet params = quiet_params();
    params.omega = 1.0;
    params.p_return = 0.3;

    Rng a(31), b(31);
    ControlOutput ca = controller_step(s, p, params, cpfa, a);
    ControlOutput cb = controller_step(s, p, params, mpfa, b);
    CHECK(ca.state.fsm == cb.state.fsm);
    CHECK(ca.state.heading == cb.state.heading);
    CHECK(ca.actions.size() == cb.actions.size());
}
