#include "gather2/graph.hpp"

#include "gather2/adversary.hpp"
#include "gather2/randomcfg.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gather2;

namespace {

Point pt(long long x, long long y) { return {Rat(x), Rat(y)}; }

SystemConfig waiting_pair(Color c0, Point p0, Color c1, Point p1) {
    SystemConfig cfg;
    cfg.robots[0].color = c0;
    cfg.robots[0].position = std::move(p0);
    cfg.robots[1].color = c1;
    cfg.robots[1].position = std::move(p1);
    cfg.delta = Rat(1, 2);
    return cfg;
}

} // namespace

TEST_CASE("abstraction of plain waiting pairs") {
    AbsConfig a = abstract_config(waiting_pair(Color::White, pt(0, 0), Color::White, pt(4, 0)));
    CHECK_FALSE(a.gathered);
    CHECK(a.teq == TgtEq::NA);
    for (int i = 0; i < 2; ++i) {
        CHECK(a.r[i].color == Color::White);
        CHECK(a.r[i].kind == PKind::Wait);
    }
    CHECK(phase_label(a.r[0]) == "W");
}

TEST_CASE("abstraction classifies pending targets") {
    SystemConfig cfg = waiting_pair(Color::White, pt(0, 0), Color::White, pt(4, 0));
    // Robot 0 computing a midpoint target with a pending switch to Black.
    cfg.robots[0].phase = PhaseComputing{ComputeOutcome{Color::Black, pt(2, 0)}};
    AbsConfig a = abstract_config(cfg);
    bool has_c2h = phase_label(a.r[0]) == "C2H" || phase_label(a.r[1]) == "C2H";
    CHECK(has_c2h);

    // Stale once the other robot is elsewhere.
    cfg.robots[1].position = pt(6, 0);
    AbsConfig b = abstract_config(cfg);
    bool has_stale = phase_label(b.r[0]) == "C2H~s" || phase_label(b.r[1]) == "C2H~s";
    CHECK(has_stale);

    // Moving dispositions are anchored at the move origin.
    SystemConfig mv = waiting_pair(Color::Black, pt(1, 0), Color::White, pt(4, 0));
    mv.robots[0].phase = PhaseMoving{pt(2, 0), pt(0, 0)}; // midpoint(origin 0, other 4)
    AbsConfig m = abstract_config(mv);
    bool has_m2h = phase_label(m.r[0]) == "M2H'" || phase_label(m.r[1]) == "M2H'";
    CHECK(has_m2h);
}

TEST_CASE("abstraction is invariant under robot swap") {
    ConfigSampler gen(0xABCD);
    for (int i = 0; i < 300; ++i) {
        SystemConfig cfg = gen.config();
        SystemConfig sw = cfg;
        std::swap(sw.robots[0], sw.robots[1]);
        CHECK(abstract_config(cfg) == abstract_config(sw));
    }
}

TEST_CASE("canonicalization is idempotent") {
    ConfigSampler gen(0xBEEF);
    for (int i = 0; i < 300; ++i) {
        AbsConfig a = abstract_config(gen.config());
        AbsConfig b = a;
        CHECK_FALSE(b.canonicalize());
        CHECK(a == b);
    }
}

TEST_CASE("every abstraction of a sampled concrete config is an enumerated node") {
    AbstractGraph g = build_graph(protocol_ours());
    ConfigSampler gen(0x5EED);
    for (int i = 0; i < 500; ++i) {
        AbsConfig a = abstract_config(gen.config());
        REQUIRE(is_coherent(a));
        CHECK_NOTHROW(g.id_of(a));
    }
}

TEST_CASE("node count equals an independent brute-force enumeration") {
    AbstractGraph g = build_graph(protocol_ours());

    // Independent oracle: enumerate raw tuples with independently written
    // validity rules, canonicalize by sorted serialized text, and count.
    std::set<std::string> distinct;
    auto robot_text = [](int color, int kind, int pend, int disp, int adv) {
        return std::to_string(color) + "," + std::to_string(kind) + "," + std::to_string(pend) + "," +
               std::to_string(disp) + "," + std::to_string(adv);
    };
    auto robot_valid = [](int kind, int pend, int disp, int adv, int gathered) {
        if (kind == 0 && (disp != 0 || pend != 0 || adv != 0)) return false; // wait
        if (kind == 1 && adv != 0) return false;                             // compute
        if (kind == 2 && (disp == 0 || pend != 0)) return false;             // move
        if (gathered && disp == 2) return false;                             // target == other is Zero
        if (gathered && kind == 1 && disp == 3) return false;                // compute midpoint == own
        return true;
    };
    // Target-point symbols mirroring the determined dispositions.
    auto sym = [](int kind, int disp) { return disp == 1 ? 1 : disp == 2 ? 2 : (disp == 3 && kind == 1) ? 3 : 0; };
    for (int c0 = 0; c0 < 2; ++c0)
        for (int k0 = 0; k0 < 3; ++k0)
            for (int p0 = 0; p0 < 2; ++p0)
                for (int d0 = 0; d0 < 5; ++d0)
                    for (int a0 = 0; a0 < 2; ++a0)
                        for (int c1 = 0; c1 < 2; ++c1)
                            for (int k1 = 0; k1 < 3; ++k1)
                                for (int p1 = 0; p1 < 2; ++p1)
                                    for (int d1 = 0; d1 < 5; ++d1)
                                        for (int a1 = 0; a1 < 2; ++a1)
                                            for (int gat = 0; gat < 2; ++gat)
                                                for (int teq = 0; teq < 3; ++teq) {
                                                    if (k0 == 1 && a0) continue;
                                                    if (k1 == 1 && a1) continue;
                                                    if (!robot_valid(k0, p0, d0, a0, gat)) continue;
                                                    if (!robot_valid(k1, p1, d1, a1, gat)) continue;
                                                    bool both = d0 != 0 && d1 != 0;
                                                    if (!both && teq != 0) continue;
                                                    if (both && teq == 0) continue;
                                                    if (both) {
                                                        int s0 = sym(k0, d0), s1 = sym(k1, d1);
                                                        if (s0 != 0 && s1 != 0) {
                                                            // points: 1=self,2=other,3=mid
                                                            auto pt_id = [&](int s, int slot) {
                                                                if (s == 3) return 2;
                                                                return (slot == 0) == (s == 1) ? 0 : 1;
                                                            };
                                                            bool eq = gat || pt_id(s0, 0) == pt_id(s1, 1);
                                                            if ((teq == 1) != eq) continue;
                                                        }
                                                    }
                                                    std::string t0 = robot_text(c0, k0, p0, d0, a0);
                                                    std::string t1 = robot_text(c1, k1, p1, d1, a1);
                                                    std::string key = (t1 < t0 ? t1 + "|" + t0 : t0 + "|" + t1) +
                                                                      "|g" + std::to_string(gat) + "|t" +
                                                                      std::to_string(teq);
                                                    distinct.insert(key);
                                                }
    CHECK(g.nodes.size() == distinct.size());
}

TEST_CASE("clean start is enumerated and reachable") {
    AbstractGraph g = build_graph(protocol_ours());
    CHECK(g.reachable[g.clean_start]);
    const AbsConfig& c = g.nodes[g.clean_start];
    CHECK(c.r[0].kind == PKind::Wait);
    CHECK(c.r[1].kind == PKind::Wait);
    CHECK_FALSE(c.gathered);
}

TEST_CASE("abstract edges: a look from both-Black contains C2W") {
    AbstractGraph g = build_graph(protocol_ours());
    AbsConfig bb{{detail::waiting_robot(Color::Black), detail::waiting_robot(Color::Black)}, false, TgtEq::NA};
    bb.canonicalize();
    std::uint32_t id = g.id_of(bb);
    bool found = false;
    for (const AbsEdge& e : g.adj[id]) {
        const AbsConfig& d = g.nodes[e.dst];
        for (int i = 0; i < 2; ++i)
            if (phase_label(d.r[i]) == "C2W") found = true;
    }
    CHECK(found);
}

namespace {

// Soundness oracle: every observed concrete transition maps to an abstract edge.
void check_soundness(const AbstractGraph& g, const Protocol& proto, const SystemConfig& start,
                     Strategy& strat, std::uint64_t max_steps) {
    RunOptions opt;
    opt.max_steps = max_steps;
    opt.record_trace = false;
    std::size_t misses = 0;
    opt.observer = [&](const SystemConfig& pre, const Action& act, const SystemConfig& post) {
        AbsConfig a = abstract_config(pre), b = abstract_config(post);
        std::uint32_t sa = g.id_of(a), sb = g.id_of(b);
        if (!g.has_edge(sa, sb)) {
            ++misses;
            if (misses < 4) {
                CAPTURE(config_label(a), config_label(b), action_json(act).dump());
                CHECK(g.has_edge(sa, sb));
            }
        }
    };
    RunResult res = run(start, proto, strat, opt);
    (void)res;
    REQUIRE(misses == 0);
}

} // namespace

TEST_CASE("soundness oracle over random runs (clean and corrupted)") {
    Protocol proto = protocol_ours();
    AbstractGraph g = build_graph(proto);
    for (int i = 0; i < 60; ++i) {
        SystemConfig start = clean_start(Rat(3 + i % 7, 1 + i % 3), Rat(1, 1 + i % 5));
        RandomStrategy strat(9000 + i);
        check_soundness(g, proto, start, strat, 3000);
    }
    ConfigSampler gen(0xFACE);
    for (int i = 0; i < 120; ++i) {
        SystemConfig start = gen.config();
        RandomStrategy strat(7000 + i);
        check_soundness(g, proto, start, strat, 3000);
    }
}

TEST_CASE("soundness oracle over the scripted counterexample (exact coincidences)") {
    for (const Protocol& proto : {protocol_viglietta(), protocol_ours()}) {
        AbstractGraph g = build_graph(proto);
        SystemConfig start = clean_start(Rat(1), Rat(1, 8));
        start.robots[0].color = Color::Black;
        start.robots[1].color = Color::Black;
        CounterexampleStrategy strat(4);
        check_soundness(g, proto, start, strat, 1000);
    }
}

TEST_CASE("soundness oracle under other protocols") {
    auto generic = parse_protocol("classl:1/3,0,1,2/3;WBWB");
    REQUIRE(generic.has_value());
    for (const Protocol& proto : {protocol_viglietta(), *generic}) {
        AbstractGraph g = build_graph(proto);
        ConfigSampler gen(0x1234 + static_cast<int>(proto.kind));
        for (int i = 0; i < 60; ++i) {
            SystemConfig start = gen.config();
            RandomStrategy strat(3000 + i);
            check_soundness(g, proto, start, strat, 2000);
        }
    }
}
