#include "gather2/protocol.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

using namespace gather2;

namespace {

Point pt(long long x, long long y) { return {Rat(x), Rat(y)}; }

Snapshot snap(Color me, Color other, Point other_local) {
    return make_snapshot(me, other, std::move(other_local));
}

std::vector<ClassLTable> enumerate_tables() {
    std::vector<Rat> lams{Rat(0), Rat(1, 2), Rat(1)};
    std::vector<ClassLTable> out;
    for (int l0 = 0; l0 < 3; ++l0)
        for (int l1 = 0; l1 < 3; ++l1)
            for (int l2 = 0; l2 < 3; ++l2)
                for (int l3 = 0; l3 < 3; ++l3)
                    for (int c = 0; c < 16; ++c) {
                        ClassLTable t;
                        t.lambda[0][0] = lams[l0];
                        t.lambda[0][1] = lams[l1];
                        t.lambda[1][0] = lams[l2];
                        t.lambda[1][1] = lams[l3];
                        t.next[0][0] = (c & 1) ? Color::Black : Color::White;
                        t.next[0][1] = (c & 2) ? Color::Black : Color::White;
                        t.next[1][0] = (c & 4) ? Color::Black : Color::White;
                        t.next[1][1] = (c & 8) ? Color::Black : Color::White;
                        out.push_back(t);
                    }
    return out;
}

} // namespace

TEST_CASE("compute_ours implements the two-color rule with a gathered guard") {
    // White & White, apart: turn Black, head to the midpoint.
    CHECK(compute_ours(snap(Color::White, Color::White, pt(4, 0))) ==
          ComputeOutcome{Color::Black, pt(2, 0)});
    // White & gathered: do nothing.
    CHECK(compute_ours(snap(Color::White, Color::White, pt(0, 0))) ==
          ComputeOutcome{Color::White, std::nullopt});
    // White sees Black: chase.
    CHECK(compute_ours(snap(Color::White, Color::Black, pt(3, 1))) ==
          ComputeOutcome{Color::White, pt(3, 1)});
    // Black & Black: turn White, stay.
    CHECK(compute_ours(snap(Color::Black, Color::Black, pt(5, 5))) ==
          ComputeOutcome{Color::White, std::nullopt});
    CHECK(compute_ours(snap(Color::Black, Color::Black, pt(0, 0))) ==
          ComputeOutcome{Color::White, std::nullopt});
    // Black sees White: no matching branch, stay Black, no motion.
    CHECK(compute_ours(snap(Color::Black, Color::White, pt(2, 0))) ==
          ComputeOutcome{Color::Black, std::nullopt});
    CHECK(compute_ours(snap(Color::Black, Color::White, pt(0, 0))) ==
          ComputeOutcome{Color::Black, std::nullopt});
    // Gathered guard beats the Black-chase branch.
    CHECK(compute_ours(snap(Color::White, Color::Black, pt(0, 0))) ==
          ComputeOutcome{Color::White, std::nullopt});
}

TEST_CASE("compute_viglietta has no gathered guard") {
    CHECK(compute_viglietta(snap(Color::White, Color::White, pt(4, 0))) ==
          ComputeOutcome{Color::Black, pt(2, 0)});
    // Gathered pair still flips to Black with a (degenerate) midpoint target.
    CHECK(compute_viglietta(snap(Color::White, Color::White, pt(0, 0))) ==
          ComputeOutcome{Color::Black, pt(0, 0)});
    CHECK(compute_viglietta(snap(Color::White, Color::Black, pt(6, 0))) ==
          ComputeOutcome{Color::White, pt(6, 0)});
    CHECK(compute_viglietta(snap(Color::Black, Color::Black, pt(1, 2))) ==
          ComputeOutcome{Color::White, std::nullopt});
    CHECK(compute_viglietta(snap(Color::Black, Color::White, pt(1, 2))) ==
          ComputeOutcome{Color::Black, std::nullopt});
}

TEST_CASE("compute_class_l interpolates") {
    ClassLTable t = viglietta_as_table();
    CHECK(compute_class_l(t, snap(Color::White, Color::White, pt(4, 0))) ==
          ComputeOutcome{Color::Black, pt(2, 0)});
    // lambda = 0 pairs produce no motion.
    CHECK(compute_class_l(t, snap(Color::Black, Color::White, pt(4, 0))) ==
          ComputeOutcome{Color::Black, std::nullopt});
}

TEST_CASE("viglietta's rule as a table agrees with compute_viglietta") {
    ClassLTable t = viglietta_as_table();
    std::vector<Point> positions{pt(1, 0), pt(-3, 2), {Rat(1, 2), Rat(5, 7)}, pt(10, -10)};
    for (Color me : {Color::White, Color::Black})
        for (Color other : {Color::White, Color::Black})
            for (const Point& p : positions)
                CHECK(compute_class_l(t, snap(me, other, p)) == compute_viglietta(snap(me, other, p)));
}

TEST_CASE("the guarded rule is not an interpolation rule") {
    // For every two-color table there is a snapshot where the outcomes differ.
    // Tables that copy the nominal behavior are caught on a gathered snapshot,
    // which is exactly where the distance-dependence lives.
    Snapshot nominal = snap(Color::White, Color::White, pt(4, 0));
    Snapshot gathered = snap(Color::White, Color::White, pt(0, 0));
    ComputeOutcome ours_nominal = compute_ours(nominal);
    ComputeOutcome ours_gathered = compute_ours(gathered);
    for (const ClassLTable& t : enumerate_tables()) {
        bool differs = compute_class_l(t, nominal) != ours_nominal ||
                       compute_class_l(t, gathered) != ours_gathered;
        if (!differs) {
            CAPTURE(fmt_rat(t.lambda[0][0]));
            FAIL("table indistinguishable from the guarded rule");
        }
    }
    // The viglietta table specifically differs exactly on the gathered snapshot.
    ClassLTable vt = viglietta_as_table();
    CHECK(compute_class_l(vt, nominal) == ours_nominal);
    CHECK(compute_class_l(vt, gathered) != ours_gathered);
}

TEST_CASE("frame invariance of the computed global destination") {
    std::mt19937_64 rng(0xC0FFEE);
    auto rnd = [&](int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return Rat(d(rng), std::uniform_int_distribution<int>(1, 6)(rng));
    };
    Point me_global{Rat(3), Rat(-2)};
    Point other_global{Rat(-5), Rat(7, 2)};
    // Reference destination computed in the identity frame.
    Snapshot ref = snap(Color::White, Color::White, other_global - me_global);
    Point ref_dest = me_global + *compute_ours(ref).target_local;
    for (int i = 0; i < 100; ++i) {
        Rat a = rnd(-4, 4), b = rnd(-4, 4), c = rnd(-4, 4), d = rnd(-4, 4);
        if (a * d - b * c == 0) {
            --i;
            continue;
        }
        Frame f(me_global, a, b, c, d);
        Snapshot s = snap(Color::White, Color::White, f.to_local(other_global));
        ComputeOutcome out = compute_ours(s);
        REQUIRE(out.target_local.has_value());
        CHECK(f.from_local(*out.target_local) == ref_dest);
    }
}

TEST_CASE("look_shape matches the concrete compute functions") {
    std::vector<Protocol> protos{protocol_ours(), protocol_viglietta(),
                                 protocol_class_l(viglietta_as_table())};
    {
        auto p = parse_protocol("classl:1/3,0,1,2/3;WBWB");
        REQUIRE(p.has_value());
        protos.push_back(*p);
    }
    std::vector<Point> others{pt(6, 0), pt(-3, 9)};
    for (const Protocol& proto : protos) {
        for (Color me : {Color::White, Color::Black})
            for (Color other : {Color::White, Color::Black}) {
                // Nominal snapshots.
                for (const Point& o : others) {
                    ComputeOutcome out = proto.compute(snap(me, other, o));
                    LookShape sh = proto.look_shape(me, other, false);
                    CHECK(out.new_color == sh.new_color);
                    switch (sh.shape) {
                    case TargetShape::None: CHECK_FALSE(out.target_local.has_value()); break;
                    case TargetShape::Zero: CHECK(*out.target_local == pt(0, 0)); break;
                    case TargetShape::Half: CHECK(*out.target_local == midpoint(pt(0, 0), o)); break;
                    case TargetShape::Other: CHECK(*out.target_local == o); break;
                    case TargetShape::Frac: CHECK(*out.target_local == o.scaled(sh.frac)); break;
                    }
                }
                // Gathered snapshot.
                ComputeOutcome out = proto.compute(snap(me, other, pt(0, 0)));
                LookShape sh = proto.look_shape(me, other, true);
                CHECK(out.new_color == sh.new_color);
                if (sh.shape == TargetShape::None)
                    CHECK_FALSE(out.target_local.has_value());
                else {
                    REQUIRE(sh.shape == TargetShape::Zero);
                    CHECK(*out.target_local == pt(0, 0));
                }
            }
    }
}

TEST_CASE("protocol selector parsing") {
    CHECK(parse_protocol("ours")->kind == Protocol::Kind::Ours);
    CHECK(parse_protocol("viglietta2")->kind == Protocol::Kind::Viglietta);
    auto p = parse_protocol("classl:0,0,1,1/2;WBWB");
    REQUIRE(p.has_value());
    CHECK(p->table == viglietta_as_table());
    CHECK_FALSE(parse_protocol("classl:0,0,1;WBWB"));
    CHECK_FALSE(parse_protocol("classl:0,0,1,2;WBWB")); // lambda out of [0,1]
    CHECK_FALSE(parse_protocol("classl:0,0,1,1/2;WBX"));
    CHECK_FALSE(parse_protocol("nonsense"));
}
