#pragma once

#include "gather2/geometry.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gather2 {

enum class Color : std::uint8_t { White = 0, Black = 1 };

inline char color_char(Color c) { return c == Color::White ? 'W' : 'B'; }
inline std::optional<Color> parse_color(char c) {
    if (c == 'W' || c == 'w') return Color::White;
    if (c == 'B' || c == 'b') return Color::Black;
    return std::nullopt;
}

// What a robot sees during LOOK, in its own coordinate system. Its own
// position is the local origin; gathered holds iff the other robot sits there.
struct Snapshot {
    Color my_color;
    Color other_color;
    Point other_pos_local;
    bool gathered;
};

inline Snapshot make_snapshot(Color me, Color other, Point other_local) {
    bool g = other_local == Point{Rat(0), Rat(0)};
    return Snapshot{me, other, std::move(other_local), g};
}

struct ComputeOutcome {
    Color new_color;
    std::optional<Point> target_local; // absent = no motion in the MOVE phase

    bool operator==(const ComputeOutcome&) const = default;
};

// Two-color gathering rule: move to the midpoint when both lights are White
// and the robots are apart, chase a Black robot, and do nothing once
// gathered. The gathered guard is what keeps a robot White after it reaches
// the other one.
inline ComputeOutcome compute_ours(const Snapshot& s) {
    if (s.my_color == Color::White) {
        if (s.gathered) return {Color::White, std::nullopt};
        if (s.other_color == Color::White)
            return {Color::Black, midpoint({Rat(0), Rat(0)}, s.other_pos_local)};
        return {Color::White, s.other_pos_local};
    }
    if (s.other_color == Color::Black) return {Color::White, std::nullopt};
    return {Color::Black, std::nullopt};
}

// The two-color rule with no gathered guard. Correct in SSYNC, beatable in
// ASYNC by a scheduler that exploits pending moves.
inline ComputeOutcome compute_viglietta(const Snapshot& s) {
    if (s.my_color == Color::White) {
        if (s.other_color == Color::White)
            return {Color::Black, midpoint({Rat(0), Rat(0)}, s.other_pos_local)};
        return {Color::White, s.other_pos_local};
    }
    if (s.other_color == Color::Black) return {Color::White, std::nullopt};
    return {Color::Black, std::nullopt};
}

// Interpolation-family rule: destination = lambda(colors) of the way to the
// other robot, next color a function of the color pair alone.
struct ClassLTable {
    // indexed [me][other]
    std::array<std::array<Rat, 2>, 2> lambda;
    std::array<std::array<Color, 2>, 2> next;

    bool operator==(const ClassLTable&) const = default;
};

inline ComputeOutcome compute_class_l(const ClassLTable& t, const Snapshot& s) {
    int me = static_cast<int>(s.my_color), ot = static_cast<int>(s.other_color);
    const Rat& l = t.lambda[me][ot];
    if (l == 0) return {t.next[me][ot], std::nullopt};
    return {t.next[me][ot], s.other_pos_local.scaled(l)};
}

// Shape of a LOOK outcome as a function of the observed colors and the
// gathered predicate alone; the abstract checker and the interval executor
// both consume this.
enum class TargetShape : std::uint8_t {
    None,  // no destination
    Zero,  // destination equals own position
    Half,  // destination is the midpoint
    Other, // destination is the other robot's position
    Frac,  // destination is a fixed fraction lambda of the way to the other
};

struct LookShape {
    Color new_color;
    TargetShape shape;
    Rat frac; // only for Frac
};

struct Protocol {
    enum class Kind : std::uint8_t { Ours, Viglietta, ClassL };

    Kind kind = Kind::Ours;
    std::string name = "ours";
    ClassLTable table{}; // ClassL only

    ComputeOutcome compute(const Snapshot& s) const {
        switch (kind) {
        case Kind::Ours: return compute_ours(s);
        case Kind::Viglietta: return compute_viglietta(s);
        case Kind::ClassL: return compute_class_l(table, s);
        }
        return {Color::White, std::nullopt};
    }

    LookShape look_shape(Color me, Color other, bool gathered) const {
        switch (kind) {
        case Kind::Ours:
            if (me == Color::White) {
                if (gathered) return {Color::White, TargetShape::None, Rat(0)};
                if (other == Color::White) return {Color::Black, TargetShape::Half, Rat(0)};
                return {Color::White, TargetShape::Other, Rat(0)};
            }
            if (other == Color::Black) return {Color::White, TargetShape::None, Rat(0)};
            return {Color::Black, TargetShape::None, Rat(0)};
        case Kind::Viglietta:
            if (me == Color::White) {
                if (other == Color::White)
                    return {Color::Black, gathered ? TargetShape::Zero : TargetShape::Half, Rat(0)};
                return {Color::White, gathered ? TargetShape::Zero : TargetShape::Other, Rat(0)};
            }
            if (other == Color::Black) return {Color::White, TargetShape::None, Rat(0)};
            return {Color::Black, TargetShape::None, Rat(0)};
        case Kind::ClassL: {
            int m = static_cast<int>(me), o = static_cast<int>(other);
            const Rat& l = table.lambda[m][o];
            Color nc = table.next[m][o];
            if (l == 0) return {nc, TargetShape::None, Rat(0)};
            if (gathered) return {nc, TargetShape::Zero, Rat(0)};
            if (l == 1) return {nc, TargetShape::Other, Rat(0)};
            if (l == Rat(1, 2)) return {nc, TargetShape::Half, Rat(0)};
            return {nc, TargetShape::Frac, l};
        }
        }
        return {Color::White, TargetShape::None, Rat(0)};
    }
};

inline Protocol protocol_ours() { return Protocol{Protocol::Kind::Ours, "ours", {}}; }
inline Protocol protocol_viglietta() { return Protocol{Protocol::Kind::Viglietta, "viglietta2", {}}; }
inline Protocol protocol_class_l(ClassLTable t, std::string name = "") {
    Protocol p{Protocol::Kind::ClassL, std::move(name), std::move(t)};
    if (p.name.empty()) {
        std::ostringstream os;
        os << "classl:";
        const char* pairs[4] = {"BB", "BW", "WB", "WW"};
        (void)pairs;
        os << fmt_rat(p.table.lambda[1][1]) << "," << fmt_rat(p.table.lambda[1][0]) << ","
           << fmt_rat(p.table.lambda[0][1]) << "," << fmt_rat(p.table.lambda[0][0]) << ";"
           << color_char(p.table.next[1][1]) << color_char(p.table.next[1][0])
           << color_char(p.table.next[0][1]) << color_char(p.table.next[0][0]);
        p.name = os.str();
    }
    return p;
}

// Viglietta's rule expressed as an interpolation table.
inline ClassLTable viglietta_as_table() {
    ClassLTable t;
    int W = 0, B = 1;
    t.lambda[B][B] = Rat(0);
    t.lambda[B][W] = Rat(0);
    t.lambda[W][B] = Rat(1);
    t.lambda[W][W] = Rat(1, 2);
    t.next[B][B] = Color::White;
    t.next[B][W] = Color::Black;
    t.next[W][B] = Color::White;
    t.next[W][W] = Color::Black;
    return t;
}

// Selector syntax: "ours" | "viglietta2" | "classl:<lBB,lBW,lWB,lWW;CCCC>"
// where CCCC are the next colors for the (me,other) pairs BB,BW,WB,WW.
inline std::optional<Protocol> parse_protocol(const std::string& sel) {
    if (sel == "ours") return protocol_ours();
    if (sel == "viglietta2") return protocol_viglietta();
    const std::string prefix = "classl:";
    if (sel.rfind(prefix, 0) != 0) return std::nullopt;
    std::string body = sel.substr(prefix.size());
    auto semi = body.find(';');
    if (semi == std::string::npos) return std::nullopt;
    std::string lams = body.substr(0, semi), cols = body.substr(semi + 1);
    if (cols.size() != 4) return std::nullopt;
    std::vector<Rat> ls;
    std::size_t pos = 0;
    while (pos <= lams.size()) {
        auto comma = lams.find(',', pos);
        std::string tok = lams.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto r = parse_rat(tok);
        if (!r || *r < 0 || *r > 1) return std::nullopt;
        ls.push_back(*r);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (ls.size() != 4) return std::nullopt;
    ClassLTable t;
    int W = 0, B = 1;
    t.lambda[B][B] = ls[0];
    t.lambda[B][W] = ls[1];
    t.lambda[W][B] = ls[2];
    t.lambda[W][W] = ls[3];
    std::array<std::pair<int, int>, 4> order{{{B, B}, {B, W}, {W, B}, {W, W}}};
    for (int i = 0; i < 4; ++i) {
        auto c = parse_color(cols[i]);
        if (!c) return std::nullopt;
        t.next[order[i].first][order[i].second] = *c;
    }
    return protocol_class_l(std::move(t), sel);
}

} // namespace gather2
