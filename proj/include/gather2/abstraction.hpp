#pragma once

#include "gather2/executor.hpp"

#include <cstdint>
#include <optional>

namespace gather2 {

// Disposition of a pending target relative to the current configuration.
// The anchor is the position the snapshot was taken from: a Computing robot
// has not moved since its LOOK, so its own position; a Moving robot's anchor
// is its move origin.
//
//   None  - no pending target
//   Zero  - target equals the robot's own position (no pending displacement)
//   Other - target equals the other robot's current position
//   Half  - target equals midpoint(anchor, other robot's current position)
//   Stale - anything else (the snapshot it came from is no longer accurate,
//           or the target was corrupted to an arbitrary point)
//
// Precedence Zero > Other > Half > Stale makes the classification a function.
enum class Disp : std::uint8_t { None = 0, Zero, Other, Half, Stale };

enum class PKind : std::uint8_t { Wait = 0, Compute, Move };

enum class TgtEq : std::uint8_t { NA = 0, Eq, Neq };

struct AbsRobot {
    Color color = Color::White;
    PKind kind = PKind::Wait;
    Color pending = Color::White; // Compute only; normalized to White otherwise
    Disp disp = Disp::None;       // None only for Wait/Compute
    bool advanced = false;        // Move only: position differs from the origin

    bool operator==(const AbsRobot&) const = default;

    bool has_target() const { return disp != Disp::None; }
    // Pending displacement: a target somewhere other than where the robot stands.
    bool pending_displacement() const {
        return disp == Disp::Other || disp == Disp::Half || disp == Disp::Stale;
    }

    std::uint16_t key() const {
        return static_cast<std::uint16_t>(static_cast<int>(color) | (static_cast<int>(kind) << 1) |
                                          (static_cast<int>(pending) << 3) | (static_cast<int>(disp) << 4) |
                                          (static_cast<int>(advanced) << 7));
    }
};

struct AbsConfig {
    std::array<AbsRobot, 2> r;
    bool gathered = false;
    TgtEq teq = TgtEq::NA;

    bool operator==(const AbsConfig&) const = default;

    std::uint32_t key() const {
        return static_cast<std::uint32_t>(r[0].key()) | (static_cast<std::uint32_t>(r[1].key()) << 8) |
               (static_cast<std::uint32_t>(gathered) << 16) | (static_cast<std::uint32_t>(teq) << 17);
    }

    // Robots are anonymous: order the two slots canonically. Returns true if
    // the slots were swapped.
    bool canonicalize() {
        if (r[1].key() < r[0].key()) {
            std::swap(r[0], r[1]);
            return true;
        }
        return false;
    }

    bool quiescent() const { return !r[0].pending_displacement() && !r[1].pending_displacement(); }
};

// Where a robot's target provably sits, expressible in terms of the current
// positions alone. Move-Half is anchored at an unknown origin, so it is not
// point-determined; neither is Stale.
enum class TgtSym : std::uint8_t { Undet = 0, SelfPos, OtherPos, Mid };

inline TgtSym target_symbol(const AbsRobot& r) {
    switch (r.disp) {
    case Disp::Zero: return TgtSym::SelfPos;
    case Disp::Other: return TgtSym::OtherPos;
    case Disp::Half: return r.kind == PKind::Compute ? TgtSym::Mid : TgtSym::Undet;
    default: return TgtSym::Undet;
    }
}

// Equality of the two pending targets, when both are point-determined.
inline std::optional<TgtEq> forced_teq(const AbsRobot& a, const AbsRobot& b, bool gathered) {
    if (!a.has_target() || !b.has_target()) return std::nullopt;
    TgtSym sa = target_symbol(a), sb = target_symbol(b);
    if (sa == TgtSym::Undet || sb == TgtSym::Undet) return std::nullopt;
    if (gathered) return TgtEq::Eq; // all determined points coincide
    // Nominal: SelfPos(a) = P0, OtherPos(a) = P1, SelfPos(b) = P1,
    // OtherPos(b) = P0, Mid = midpoint; P0, P1, Mid pairwise distinct.
    auto pt_of = [](TgtSym s, int slot) -> int {
        if (s == TgtSym::Mid) return 2;
        bool self = s == TgtSym::SelfPos;
        return (slot == 0) == self ? 0 : 1;
    };
    return pt_of(sa, 0) == pt_of(sb, 1) ? TgtEq::Eq : TgtEq::Neq;
}

inline bool robot_coherent(const AbsRobot& r, bool gathered) {
    switch (r.kind) {
    case PKind::Wait:
        if (r.disp != Disp::None || r.pending != Color::White || r.advanced) return false;
        break;
    case PKind::Compute:
        if (r.advanced) return false;
        break;
    case PKind::Move:
        if (r.disp == Disp::None || r.pending != Color::White) return false;
        break;
    }
    if (gathered) {
        if (r.disp == Disp::Other) return false; // own == other: it would be Zero
        if (r.kind == PKind::Compute && r.disp == Disp::Half) return false; // mid == own
    }
    return true;
}

inline bool is_coherent(const AbsConfig& c) {
    if (!robot_coherent(c.r[0], c.gathered) || !robot_coherent(c.r[1], c.gathered)) return false;
    bool both = c.r[0].has_target() && c.r[1].has_target();
    if (!both) return c.teq == TgtEq::NA;
    if (c.teq == TgtEq::NA) return false;
    if (auto f = forced_teq(c.r[0], c.r[1], c.gathered); f && *f != c.teq) return false;
    return true;
}

namespace detail {

inline Disp classify_target(const Point& target, const Point& own, const Point& other, const Point& anchor) {
    if (target == own) return Disp::Zero;
    if (target == other) return Disp::Other;
    if (target == midpoint(anchor, other)) return Disp::Half;
    return Disp::Stale;
}

inline std::optional<Point> global_target(const RobotState& r) {
    if (auto* c = std::get_if<PhaseComputing>(&r.phase)) {
        if (!c->outcome.target_local) return std::nullopt;
        return r.frame_here().from_local(*c->outcome.target_local);
    }
    if (auto* m = std::get_if<PhaseMoving>(&r.phase)) return m->target;
    return std::nullopt;
}

} // namespace detail

// The finite abstraction of a concrete configuration: colors, phase kinds,
// pending-color and target dispositions, the advanced bit, the gathered
// predicate, and whether the two pending targets coincide. Canonical under
// robot swap.
inline AbsConfig abstract_config(const SystemConfig& cfg) {
    AbsConfig a;
    a.gathered = cfg.positions_equal();
    std::array<std::optional<Point>, 2> targets;
    for (int i = 0; i < 2; ++i) {
        const RobotState& r = cfg.robots[i];
        const RobotState& o = cfg.robots[1 - i];
        AbsRobot& ar = a.r[i];
        ar.color = r.color;
        targets[i] = detail::global_target(r);
        if (r.waiting()) {
            ar.kind = PKind::Wait;
        } else if (auto* c = std::get_if<PhaseComputing>(&r.phase)) {
            ar.kind = PKind::Compute;
            ar.pending = c->outcome.new_color;
            ar.disp = targets[i] ? detail::classify_target(*targets[i], r.position, o.position, r.position)
                                 : Disp::None;
        } else {
            const auto& m = std::get<PhaseMoving>(r.phase);
            ar.kind = PKind::Move;
            ar.disp = detail::classify_target(m.target, r.position, o.position, m.move_origin);
            ar.advanced = r.position != m.move_origin;
        }
    }
    if (targets[0] && targets[1]) a.teq = *targets[0] == *targets[1] ? TgtEq::Eq : TgtEq::Neq;
    a.canonicalize();
    return a;
}

// Reporting labels in the paper-style phase vocabulary, annotated with the
// disposition when it differs from the phase's natural one and with a prime
// for Moving robots that have left their origin.
inline std::string phase_label(const AbsRobot& r) {
    std::string base;
    Disp natural = Disp::None;
    switch (r.kind) {
    case PKind::Wait: return "W";
    case PKind::Compute:
        if (r.has_target()) {
            base = r.pending == Color::Black ? "C2H" : "C2O";
            natural = r.pending == Color::Black ? Disp::Half : Disp::Other;
        } else {
            if (r.pending == Color::Black)
                base = "C2B";
            else
                base = r.color == Color::White ? "C2N" : "C2W";
        }
        break;
    case PKind::Move:
        base = r.disp == Disp::Other ? "M2O" : "M2H";
        natural = r.disp == Disp::Other ? Disp::Other : Disp::Half;
        break;
    }
    if (r.has_target() && r.disp != natural) {
        const char* tag[] = {"", "~z", "~o", "~h", "~s"};
        base += tag[static_cast<int>(r.disp)];
    }
    if (r.advanced) base += "'";
    return base;
}

inline std::string config_label(const AbsConfig& c) {
    std::string s;
    s += color_char(c.r[0].color);
    s += ":";
    s += phase_label(c.r[0]);
    s += " ";
    s += color_char(c.r[1].color);
    s += ":";
    s += phase_label(c.r[1]);
    if (c.r[0].kind == PKind::Compute) s += c.r[0].pending == Color::Black ? "" : "";
    s += c.gathered ? " G" : " n";
    if (c.teq != TgtEq::NA) s += c.teq == TgtEq::Eq ? " t=" : " t!";
    return s;
}

} // namespace gather2
