#include "gather2/adversary.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace gather2;

namespace {

Point pt(long long x, long long y) { return {Rat(x), Rat(y)}; }

SystemConfig two_waiting(Color c0, Point p0, Color c1, Point p1, Rat delta) {
    SystemConfig cfg;
    cfg.robots[0].color = c0;
    cfg.robots[0].position = std::move(p0);
    cfg.robots[1].color = c1;
    cfg.robots[1].position = std::move(p1);
    cfg.delta = std::move(delta);
    return cfg;
}

SystemConfig must_step(const SystemConfig& cfg, const Action& a, const Protocol& p) {
    StepOutcome out = step(cfg, a, p);
    REQUIRE(step_ok(out));
    return std::get<SystemConfig>(out);
}

StepFault must_fault(const SystemConfig& cfg, const Action& a, const Protocol& p) {
    StepOutcome out = step(cfg, a, p);
    REQUIRE_FALSE(step_ok(out));
    return std::get<StepFault>(out);
}

} // namespace

TEST_CASE("EndMove honors the min-progress interval") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::White, pt(0, 0), Color::Black, pt(8, 0), Rat(1));
    cfg.robots[0].phase = PhaseMoving{pt(8, 0), pt(0, 0)};

    SECTION("stopping at delta is legal") {
        SystemConfig post = must_step(cfg, ActEndMove{0, pt(1, 0)}, proto);
        CHECK(post.robots[0].position == pt(1, 0));
        CHECK(post.robots[0].waiting());
    }
    SECTION("stopping before delta is rejected without mutation") {
        StepFault f = must_fault(cfg, ActEndMove{0, {Rat(1, 2), Rat(0)}}, proto);
        CHECK(f.code == StepError::IllegalEndpoint);
    }
    SECTION("endpoint off the segment is rejected") {
        StepFault f = must_fault(cfg, ActEndMove{0, pt(9, 0)}, proto);
        CHECK(f.code == StepError::IllegalEndpoint);
        CHECK(must_fault(cfg, ActEndMove{0, pt(1, 1)}, proto).code == StepError::IllegalEndpoint);
    }
}

TEST_CASE("target closer than delta forces the full move") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::White, pt(0, 0), Color::Black, pt(8, 0), Rat(1));
    cfg.robots[0].phase = PhaseMoving{{Rat(1, 2), Rat(0)}, pt(0, 0)};
    CHECK(must_fault(cfg, ActEndMove{0, {Rat(1, 4), Rat(0)}}, proto).code == StepError::IllegalEndpoint);
    SystemConfig post = must_step(cfg, ActEndMove{0, {Rat(1, 2), Rat(0)}}, proto);
    CHECK(post.robots[0].position == Point{Rat(1, 2), Rat(0)});
}

TEST_CASE("zero-length move: ending at the target is legal") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::Black, pt(3, 3), Color::Black, pt(5, 5), Rat(1));
    cfg.robots[0].phase = PhaseMoving{pt(3, 3), pt(3, 3)};
    SystemConfig post = must_step(cfg, ActEndMove{0, pt(3, 3)}, proto);
    CHECK(post.robots[0].waiting());
    CHECK(post.robots[0].position == pt(3, 3));
}

TEST_CASE("both-Black robot turns White in place") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::Black, pt(0, 0), Color::Black, pt(4, 0), Rat(1));
    SystemConfig c1 = must_step(cfg, ActLook{0}, proto);
    CHECK(c1.robots[0].computing());
    SystemConfig c2 = must_step(c1, ActFinishCompute{0}, proto);
    CHECK(c2.robots[0].color == Color::White);
    CHECK(c2.robots[0].position == pt(0, 0));
    CHECK(c2.robots[0].waiting());
}

TEST_CASE("phase mismatches are rejected") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::White, pt(0, 0), Color::White, pt(4, 0), Rat(1));
    CHECK(must_fault(cfg, ActFinishCompute{0}, proto).code == StepError::IllegalPhase);
    CHECK(must_fault(cfg, ActEndMove{0, pt(1, 0)}, proto).code == StepError::IllegalPhase);
    CHECK(must_fault(cfg, ActAdvanceMove{0, pt(1, 0)}, proto).code == StepError::IllegalPhase);
    SystemConfig c1 = must_step(cfg, ActLook{0}, proto);
    CHECK(must_fault(c1, ActLook{0}, proto).code == StepError::IllegalPhase);
    CHECK(must_fault(c1, ActBothLook{}, proto).code == StepError::IllegalPhase);
}

TEST_CASE("AdvanceMove stays within the remaining segment and keeps Moving") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::White, pt(0, 0), Color::Black, pt(8, 0), Rat(1));
    cfg.robots[0].phase = PhaseMoving{pt(8, 0), pt(0, 0)};
    SystemConfig c1 = must_step(cfg, ActAdvanceMove{0, pt(2, 0)}, proto);
    CHECK(c1.robots[0].moving());
    CHECK(c1.robots[0].position == pt(2, 0));
    // Waypoints may not go backward.
    CHECK(must_fault(c1, ActAdvanceMove{0, pt(1, 0)}, proto).code == StepError::IllegalEndpoint);
    // No-op waypoint is allowed.
    SystemConfig c2 = must_step(c1, ActAdvanceMove{0, pt(2, 0)}, proto);
    CHECK(c2 == c1);
    // Mid-move position is visible to the other robot's snapshot.
    c1.robots[1].color = Color::White; // White observer computes a midpoint target
    SystemConfig c3 = must_step(c1, ActLook{1}, proto);
    const auto& comp = std::get<PhaseComputing>(c3.robots[1].phase);
    REQUIRE(comp.outcome.target_local.has_value());
    CHECK(c3.robots[1].frame_here().from_local(*comp.outcome.target_local) == pt(5, 0));
}

TEST_CASE("gathered-quiescent predicate") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::White, pt(1, 1), Color::White, pt(1, 1), Rat(1));
    CHECK(is_gathered_quiescent(cfg));

    SECTION("pending displacement blocks quiescence") {
        cfg.robots[0].phase = PhaseMoving{pt(2, 2), pt(1, 1)};
        CHECK_FALSE(is_gathered_quiescent(cfg));
    }
    SECTION("computing toward own position is quiescent, and no successor separates") {
        cfg.robots[0].phase = PhaseComputing{ComputeOutcome{Color::Black, pt(0, 0)}};
        REQUIRE(is_gathered_quiescent(cfg));
        // Exhaustive successor check over the legal actions from here.
        std::vector<Action> legal{ActFinishCompute{0}, ActLook{1}};
        for (const Action& a : legal) {
            SystemConfig post = must_step(cfg, a, proto);
            CHECK(post.positions_equal());
            CHECK(is_gathered_quiescent(post));
        }
    }
    SECTION("moving with target equal to position is quiescent") {
        cfg.robots[1].phase = PhaseMoving{pt(1, 1), pt(0, 0)};
        CHECK(is_gathered_quiescent(cfg));
    }
}

TEST_CASE("gathered-quiescent closure under random fair actions") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::Black, pt(2, 3), Color::White, pt(2, 3), Rat(1, 2));
    RandomStrategy strat(1234);
    FairnessView fair;
    for (int i = 0; i < 200; ++i) {
        auto act = strat.next(cfg, fair);
        REQUIRE(act.has_value());
        StepOutcome out = step(cfg, *act, proto);
        REQUIRE(step_ok(out));
        cfg = std::get<SystemConfig>(out);
        CHECK(is_gathered_quiescent(cfg));
    }
}

TEST_CASE("swap symmetry: relabeling robots relabels the trace") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = two_waiting(Color::White, pt(0, 0), Color::Black, pt(7, 0), Rat(1));
    cfg.robots[0].local_frame = Frame({Rat(0), Rat(0)}, Rat(2), Rat(0), Rat(0), Rat(1));

    auto swap_cfg = [](SystemConfig c) {
        std::swap(c.robots[0], c.robots[1]);
        return c;
    };
    auto swap_act = [](Action a) {
        std::visit(
            [](auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (!std::is_same_v<T, ActBothLook>) x.robot = 1 - x.robot;
            },
            a);
        return a;
    };

    std::vector<Action> script{ActLook{0},  ActFinishCompute{0}, ActAdvanceMove{0, pt(2, 0)},
                               ActLook{1},  ActFinishCompute{1}, ActEndMove{0, pt(3, 0)},
                               ActBothLook{}};
    SystemConfig a = cfg, b = swap_cfg(cfg);
    for (const Action& act : script) {
        StepOutcome oa = step(a, act, proto);
        StepOutcome ob = step(b, swap_act(act), proto);
        REQUIRE(step_ok(oa));
        REQUIRE(step_ok(ob));
        a = std::get<SystemConfig>(oa);
        b = std::get<SystemConfig>(ob);
        CHECK(swap_cfg(a) == b);
    }
}

TEST_CASE("collinearity is preserved by every step") {
    Protocol proto = protocol_ours();
    std::mt19937_64 rng(77);
    auto line_pt = [&](Rat t) { return Point{t, t * 2}; }; // the line y = 2x
    SystemConfig cfg = two_waiting(Color::White, line_pt(Rat(0)), Color::White, line_pt(Rat(5)), Rat(1, 4));
    cfg.robots[0].phase = PhaseMoving{line_pt(Rat(3)), line_pt(Rat(0))};
    auto collinear = [&](const SystemConfig& c) {
        Point dir{Rat(1), Rat(2)};
        for (const RobotState& r : c.robots) {
            if (cross(dir, r.position - line_pt(Rat(0))) != 0) return false;
            if (auto* m = std::get_if<PhaseMoving>(&r.phase))
                if (cross(dir, m->target - line_pt(Rat(0))) != 0) return false;
        }
        return true;
    };
    REQUIRE(collinear(cfg));
    RandomStrategy strat(5150);
    FairnessView fair;
    for (int i = 0; i < 300 && !is_gathered_quiescent(cfg); ++i) {
        auto act = strat.next(cfg, fair);
        REQUIRE(act.has_value());
        StepOutcome out = step(cfg, *act, proto);
        REQUIRE(step_ok(out));
        cfg = std::get<SystemConfig>(out);
        CHECK(collinear(cfg));
    }
}

TEST_CASE("trace serialization and replay round-trip") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = clean_start(Rat(3), Rat(1, 4));
    RandomStrategy strat(42);
    RunOptions opt;
    opt.max_steps = 500;
    RunResult res = run(cfg, proto, strat, opt);
    REQUIRE(res.verdict == Verdict::Gathered);
    res.trace.seed = 42;

    std::stringstream ss;
    write_trace(ss, res.trace);
    Trace back = read_trace(ss);
    CHECK(back == res.trace);

    auto replayed = replay(back, proto);
    REQUIRE(std::holds_alternative<SystemConfig>(replayed));
    CHECK(std::get<SystemConfig>(replayed) == res.final);

    // Corrupted digests are detected.
    back.records.back().digest ^= 1;
    auto bad = replay(back, proto);
    REQUIRE(std::holds_alternative<ReplayError>(bad));
}

TEST_CASE("run determinism: identical inputs give byte-identical traces") {
    Protocol proto = protocol_ours();
    SystemConfig cfg = clean_start(Rat(5), Rat(1, 3));
    std::string t1, t2;
    for (std::string* out : {&t1, &t2}) {
        RandomStrategy strat(2024);
        RunOptions opt;
        opt.max_steps = 2000;
        RunResult res = run(cfg, proto, strat, opt);
        std::stringstream ss;
        write_trace(ss, res.trace);
        *out = ss.str();
    }
    CHECK(t1 == t2);
}

TEST_CASE("run verdicts") {
    Protocol proto = protocol_ours();
    SECTION("max_steps 0 on a non-gathered config times out") {
        SystemConfig cfg = clean_start(Rat(1), Rat(1));
        FsyncStrategy strat;
        RunOptions opt;
        opt.max_steps = 0;
        CHECK(run(cfg, proto, strat, opt).verdict == Verdict::Timeout);
    }
    SECTION("already gathered start returns Gathered with zero steps") {
        SystemConfig cfg = clean_start(Rat(0), Rat(1));
        FsyncStrategy strat;
        RunResult res = run(cfg, proto, strat);
        CHECK(res.verdict == Verdict::Gathered);
        CHECK(res.steps == 0);
    }
    SECTION("a strategy proposing illegal actions faults the run") {
        SystemConfig cfg = clean_start(Rat(4), Rat(1));
        std::vector<Action> bad{ActFinishCompute{0}};
        ScriptStrategy strat(std::move(bad));
        RunResult res = run(cfg, proto, strat);
        CHECK(res.verdict == Verdict::StrategyFault);
        CHECK_FALSE(res.diagnostic.empty());
    }
}

TEST_CASE("delta-soundness of accepted traces") {
    // Every EndMove in a random fair run covers at least min(delta, full move
    // distance), measured from the move origin. Checked exactly on squares.
    Protocol proto = protocol_ours();
    SystemConfig cfg = clean_start(Rat(9), Rat(2, 3));
    RandomStrategy strat(99);
    RunOptions opt;
    opt.max_steps = 5000;
    opt.observer = [&](const SystemConfig& pre, const Action& act, const SystemConfig&) {
        if (auto* e = std::get_if<ActEndMove>(&act)) {
            const auto& m = std::get<PhaseMoving>(pre.robots[e->robot].phase);
            Rat covered = dist_sq(m.move_origin, e->endpoint);
            Rat full = dist_sq(m.move_origin, m.target);
            Rat d2 = pre.delta * pre.delta;
            CHECK((covered >= full || covered >= d2));
        }
    };
    RunResult res = run(cfg, proto, strat, opt);
    CHECK(res.verdict == Verdict::Gathered);
}
