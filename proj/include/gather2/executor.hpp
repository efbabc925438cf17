#pragma once

#include "gather2/protocol.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace gather2 {

// Per-robot phase machine. LOOK is instantaneous; the outcome is computed at
// LOOK time (it is a pure function of the snapshot) and applied at
// FinishCompute, which is observationally the same as computing it then.
struct PhaseWait {
    bool operator==(const PhaseWait&) const = default;
};
struct PhaseComputing {
    ComputeOutcome outcome; // target_local is in the robot's frame at LOOK time
    bool operator==(const PhaseComputing&) const = default;
};
struct PhaseMoving {
    Point target;      // global
    Point move_origin; // global position where the MOVE phase began
    bool operator==(const PhaseMoving&) const = default;
};
using PhaseState = std::variant<PhaseWait, PhaseComputing, PhaseMoving>;

struct RobotState {
    Color color = Color::White;
    Point position{Rat(0), Rat(0)};
    PhaseState phase = PhaseWait{};
    Frame local_frame = Frame::identity(); // origin tracks position

    bool operator==(const RobotState&) const = default;

    Frame frame_here() const { return local_frame.with_origin(position); }
    bool waiting() const { return std::holds_alternative<PhaseWait>(phase); }
    bool computing() const { return std::holds_alternative<PhaseComputing>(phase); }
    bool moving() const { return std::holds_alternative<PhaseMoving>(phase); }
};

struct SystemConfig {
    std::array<RobotState, 2> robots;
    Rat delta = Rat(1); // adversary data; never read by protocol functions

    bool operator==(const SystemConfig&) const = default;

    bool positions_equal() const { return robots[0].position == robots[1].position; }
};

// Scheduler decisions. Waypoints/endpoints are global points chosen by the
// adversary on the robot's remaining move segment.
struct ActLook {
    int robot;
    bool operator==(const ActLook&) const = default;
};
struct ActFinishCompute {
    int robot;
    bool operator==(const ActFinishCompute&) const = default;
};
struct ActAdvanceMove {
    int robot;
    Point waypoint;
    bool operator==(const ActAdvanceMove&) const = default;
};
struct ActEndMove {
    int robot;
    Point endpoint;
    bool operator==(const ActEndMove&) const = default;
};
struct ActBothLook {
    bool operator==(const ActBothLook&) const = default;
};
using Action = std::variant<ActLook, ActFinishCompute, ActAdvanceMove, ActEndMove, ActBothLook>;

inline int acting_robot(const Action& a) {
    return std::visit(
        [](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ActBothLook>)
                return -1;
            else
                return x.robot;
        },
        a);
}

inline bool involves_robot(const Action& a, int r) {
    int ar = acting_robot(a);
    return ar == -1 || ar == r;
}

enum class StepError : std::uint8_t { IllegalRobot, IllegalPhase, IllegalEndpoint };

struct StepFault {
    StepError code;
    std::string detail;
};

using StepOutcome = std::variant<SystemConfig, StepFault>;

inline bool step_ok(const StepOutcome& o) { return std::holds_alternative<SystemConfig>(o); }

namespace detail {

inline StepOutcome fault(StepError c, std::string d) { return StepFault{c, std::move(d)}; }

inline void do_look(SystemConfig& cfg, int r, const Protocol& proto) {
    const RobotState& me = cfg.robots[r];
    const RobotState& other = cfg.robots[1 - r];
    Frame f = me.frame_here();
    Snapshot snap = make_snapshot(me.color, other.color, f.to_local(other.position));
    cfg.robots[r].phase = PhaseComputing{proto.compute(snap)};
}

} // namespace detail

// One scheduler decision applied to a configuration. Illegal actions are
// rejected without mutating anything.
inline StepOutcome step(const SystemConfig& cfg0, const Action& action, const Protocol& proto) {
    SystemConfig cfg = cfg0;
    int ar = acting_robot(action);
    if (ar != -1 && ar != 0 && ar != 1) return detail::fault(StepError::IllegalRobot, "robot index out of range");

    if (std::holds_alternative<ActBothLook>(action)) {
        if (!cfg.robots[0].waiting() || !cfg.robots[1].waiting())
            return detail::fault(StepError::IllegalPhase, "BothLook requires both robots in Wait");
        // Instantaneous simultaneous LOOKs: both snapshots read the same state.
        detail::do_look(cfg, 0, proto);
        detail::do_look(cfg, 1, proto);
        return cfg;
    }

    RobotState& me = cfg.robots[ar];

    if (auto* lk = std::get_if<ActLook>(&action)) {
        (void)lk;
        if (!me.waiting()) return detail::fault(StepError::IllegalPhase, "Look requires Wait");
        detail::do_look(cfg, ar, proto);
        return cfg;
    }

    if (std::holds_alternative<ActFinishCompute>(action)) {
        auto* comp = std::get_if<PhaseComputing>(&me.phase);
        if (!comp) return detail::fault(StepError::IllegalPhase, "FinishCompute requires Computing");
        ComputeOutcome out = comp->outcome;
        me.color = out.new_color;
        if (out.target_local) {
            Point target = me.frame_here().from_local(*out.target_local);
            me.phase = PhaseMoving{target, me.position};
        } else {
            me.phase = PhaseWait{};
        }
        return cfg;
    }

    if (auto* adv = std::get_if<ActAdvanceMove>(&action)) {
        auto* mov = std::get_if<PhaseMoving>(&me.phase);
        if (!mov) return detail::fault(StepError::IllegalPhase, "AdvanceMove requires Moving");
        if (!on_segment(adv->waypoint, me.position, mov->target))
            return detail::fault(StepError::IllegalEndpoint,
                                 "waypoint not on remaining segment " + fmt_point(adv->waypoint));
        me.position = adv->waypoint;
        return cfg;
    }

    if (auto* end = std::get_if<ActEndMove>(&action)) {
        auto* mov = std::get_if<PhaseMoving>(&me.phase);
        if (!mov) return detail::fault(StepError::IllegalPhase, "EndMove requires Moving");
        if (!on_segment(end->endpoint, me.position, mov->target))
            return detail::fault(StepError::IllegalEndpoint,
                                 "endpoint not on remaining segment " + fmt_point(end->endpoint));
        // Completed MOVE must cover at least min(delta, full target distance),
        // measured from the move origin. Decided exactly on squares.
        Rat covered = dist_sq(mov->move_origin, end->endpoint);
        Rat full = dist_sq(mov->move_origin, mov->target);
        Rat d2 = cfg.delta * cfg.delta;
        if (covered < full && covered < d2)
            return detail::fault(StepError::IllegalEndpoint,
                                 "endpoint violates the min-progress rule at " + fmt_point(end->endpoint));
        me.position = end->endpoint;
        me.phase = PhaseWait{};
        return cfg;
    }

    return detail::fault(StepError::IllegalPhase, "unknown action");
}

// Positions equal and no pending displacement anywhere: Wait, Computing with
// an absent or zero-displacement target, or Moving already at its target.
inline bool robot_quiescent_at(const RobotState& r) {
    if (r.waiting()) return true;
    if (auto* c = std::get_if<PhaseComputing>(&r.phase)) {
        if (!c->outcome.target_local) return true;
        return r.frame_here().from_local(*c->outcome.target_local) == r.position;
    }
    const auto& m = std::get<PhaseMoving>(r.phase);
    return m.target == r.position;
}

inline bool is_gathered_quiescent(const SystemConfig& cfg) {
    return cfg.positions_equal() && robot_quiescent_at(cfg.robots[0]) && robot_quiescent_at(cfg.robots[1]);
}

// --- canonical serialization + digest -------------------------------------

inline void serialize_config(const SystemConfig& cfg, std::string& out) {
    auto rat_to = [&](const Rat& r) {
        out += fmt_rat(r);
        out += ' ';
    };
    auto pt = [&](const Point& p) {
        rat_to(p.x);
        rat_to(p.y);
    };
    for (const RobotState& r : cfg.robots) {
        out += color_char(r.color);
        pt(r.position);
        rat_to(r.local_frame.a);
        rat_to(r.local_frame.b);
        rat_to(r.local_frame.c);
        rat_to(r.local_frame.d);
        if (r.waiting()) {
            out += "w;";
        } else if (auto* c = std::get_if<PhaseComputing>(&r.phase)) {
            out += 'c';
            out += color_char(c->outcome.new_color);
            if (c->outcome.target_local)
                pt(*c->outcome.target_local);
            else
                out += '-';
            out += ';';
        } else {
            const auto& m = std::get<PhaseMoving>(r.phase);
            out += 'm';
            pt(m.target);
            pt(m.move_origin);
            out += ';';
        }
    }
    out += "d=";
    rat_to(cfg.delta);
}

inline std::uint64_t config_digest(const SystemConfig& cfg) {
    std::string s;
    s.reserve(256);
    serialize_config(cfg, s);
    Fnv1a h;
    h.feed(s);
    return h.h;
}

} // namespace gather2
