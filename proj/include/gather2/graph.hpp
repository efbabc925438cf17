#pragma once

#include "gather2/abstraction.hpp"
#include "gather2/protocol.hpp"

#include <cassert>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace gather2 {

enum class ActKind : std::uint8_t { Look, Both, Finish, Advance, End };

// Refinement of Advance/End outcomes the certifier needs.
//   Noop     - position unchanged
//   Partial  - moved, did not reach the target, did not land on the other robot
//   Arrive   - moved onto the target (Advance only: still Moving)
//   HitOther - moved onto the other robot, target lies beyond (Advance, Stale)
//   Short    - End anywhere except the other robot's position
//   Gather   - End exactly on the other robot's position
enum class MoveVar : std::uint8_t { NoVar = 0, Noop, Partial, Arrive, HitOther, Short, Gather };

inline const char* act_name(ActKind a) {
    switch (a) {
    case ActKind::Look: return "look";
    case ActKind::Both: return "both";
    case ActKind::Finish: return "finish";
    case ActKind::Advance: return "advance";
    case ActKind::End: return "end";
    }
    return "?";
}

inline const char* var_name(MoveVar v) {
    const char* n[] = {"", "noop", "partial", "arrive", "hit", "short", "gather"};
    return n[static_cast<int>(v)];
}

struct AbsEdge {
    std::uint32_t dst = 0;
    std::int8_t slot = -1; // acting slot in the canonical source; -1 = both
    ActKind act = ActKind::Look;
    MoveVar var = MoveVar::NoVar;
    bool flip = false; // destination canonicalization swapped the slots

    bool operator==(const AbsEdge&) const = default;
};

struct AbstractGraph {
    Protocol proto;
    std::vector<AbsConfig> nodes;
    std::unordered_map<std::uint32_t, std::uint32_t> index; // AbsConfig::key -> id
    std::vector<std::vector<AbsEdge>> adj;
    std::vector<std::vector<std::uint32_t>> radj;
    std::unordered_set<std::uint64_t> edge_pairs; // src<<32 | dst
    std::uint32_t clean_start = 0;
    std::vector<char> reachable;
    std::size_t edge_count = 0;

    std::uint32_t id_of(const AbsConfig& c) const {
        auto it = index.find(c.key());
        if (it == index.end()) throw std::logic_error("abstract config not enumerated: " + config_label(c));
        return it->second;
    }

    bool has_edge(std::uint32_t s, std::uint32_t d) const {
        return edge_pairs.count((static_cast<std::uint64_t>(s) << 32) | d) != 0;
    }
};

namespace detail {

inline Disp shape_to_disp(TargetShape s) {
    switch (s) {
    case TargetShape::None: return Disp::None;
    case TargetShape::Zero: return Disp::Zero;
    case TargetShape::Half: return Disp::Half;
    case TargetShape::Other: return Disp::Other;
    case TargetShape::Frac: return Disp::Stale;
    }
    return Disp::None;
}

inline AbsRobot waiting_robot(Color c) { return AbsRobot{c, PKind::Wait, Color::White, Disp::None, false}; }

inline AbsRobot look_result(Color current, const LookShape& sh) {
    return AbsRobot{current, PKind::Compute, sh.new_color, shape_to_disp(sh.shape), false};
}

// Possible dispositions for a pending target after the *other* robot moved.
inline std::vector<Disp> rebranch(Disp d) {
    switch (d) {
    case Disp::None: return {Disp::None};
    case Disp::Zero: return {Disp::Zero};
    case Disp::Other: return {Disp::Half, Disp::Stale};
    case Disp::Half: return {Disp::Other, Disp::Stale};
    case Disp::Stale: return {Disp::Other, Disp::Half, Disp::Stale};
    }
    return {};
}

inline std::vector<TgtEq> teq_options(const AbsRobot& a, const AbsRobot& b, bool gathered) {
    if (!a.has_target() || !b.has_target()) return {TgtEq::NA};
    if (auto f = forced_teq(a, b, gathered)) return {*f};
    return {TgtEq::Eq, TgtEq::Neq};
}

struct EdgeBuilder {
    AbstractGraph& g;
    std::uint32_t src;
    std::unordered_set<std::uint64_t> seen;

    void emit(AbsConfig dest, int slot, ActKind act, MoveVar var) {
        if (!is_coherent(dest)) return;
        bool flip = dest.canonicalize();
        std::uint32_t dst = g.id_of(dest);
        std::uint64_t dkey = static_cast<std::uint64_t>(dst) << 16 |
                             static_cast<std::uint64_t>(static_cast<std::uint8_t>(slot + 1)) << 8 |
                             static_cast<std::uint64_t>(static_cast<int>(act)) << 4 |
                             static_cast<std::uint64_t>(static_cast<int>(var));
        if (!seen.insert(dkey).second) return;
        g.adj[src].push_back(AbsEdge{dst, static_cast<std::int8_t>(slot), act, var, flip});
        g.radj[dst].push_back(src);
        g.edge_pairs.insert((static_cast<std::uint64_t>(src) << 32) | dst);
        ++g.edge_count;
    }
};

inline void successors(AbstractGraph& g, std::uint32_t id) {
    const AbsConfig c = g.nodes[id];
    EdgeBuilder eb{g, id, {}};

    // Simultaneous LOOK pair.
    if (c.r[0].kind == PKind::Wait && c.r[1].kind == PKind::Wait) {
        LookShape s0 = g.proto.look_shape(c.r[0].color, c.r[1].color, c.gathered);
        LookShape s1 = g.proto.look_shape(c.r[1].color, c.r[0].color, c.gathered);
        AbsConfig d = c;
        d.r[0] = look_result(c.r[0].color, s0);
        d.r[1] = look_result(c.r[1].color, s1);
        for (TgtEq t : teq_options(d.r[0], d.r[1], c.gathered)) {
            AbsConfig dd = d;
            dd.teq = t;
            eb.emit(dd, -1, ActKind::Both, MoveVar::NoVar);
        }
    }

    for (int s = 0; s < 2; ++s) {
        const AbsRobot& me = c.r[s];
        const AbsRobot& other = c.r[1 - s];

        if (me.kind == PKind::Wait) {
            LookShape sh = g.proto.look_shape(me.color, other.color, c.gathered);
            AbsConfig d = c;
            d.r[s] = look_result(me.color, sh);
            for (TgtEq t : teq_options(d.r[s], other, c.gathered)) {
                AbsConfig dd = d;
                dd.teq = t;
                eb.emit(dd, s, ActKind::Look, MoveVar::NoVar);
            }
            continue;
        }

        if (me.kind == PKind::Compute) {
            AbsConfig d = c;
            if (me.disp == Disp::None) {
                d.r[s] = waiting_robot(me.pending);
                d.teq = TgtEq::NA;
            } else {
                d.r[s] = AbsRobot{me.pending, PKind::Move, Color::White, me.disp, false};
                // targets unchanged, so teq carries over
            }
            eb.emit(d, s, ActKind::Finish, MoveVar::NoVar);
            continue;
        }

        // Moving.
        // No-op waypoint.
        eb.emit(c, s, ActKind::Advance, MoveVar::Noop);
        // No-motion EndMove: legal once the robot has advanced, or when the
        // move was zero-length to begin with.
        if (me.advanced || me.disp == Disp::Zero) {
            AbsConfig d = c;
            d.r[s] = waiting_robot(me.color);
            d.teq = TgtEq::NA;
            eb.emit(d, s, ActKind::End, MoveVar::Noop);
        }
        if (me.disp == Disp::Zero) continue; // no displacement left

        auto other_variants = [&](bool post_gathered) {
            std::vector<Disp> out;
            for (Disp nd : rebranch(other.disp))
                if (!(post_gathered && nd == Disp::Other)) out.push_back(nd);
            return out;
        };

        // AdvanceMove with actual motion.
        struct OwnVar {
            MoveVar var;
            Disp disp;
            bool post_gathered;
        };
        std::vector<OwnVar> own;
        own.push_back({MoveVar::Partial, me.disp, false});
        own.push_back({MoveVar::Arrive, Disp::Zero, me.disp == Disp::Other});
        if (me.disp == Disp::Stale) own.push_back({MoveVar::HitOther, Disp::Stale, true});
        for (const OwnVar& v : own) {
            for (Disp od : other_variants(v.post_gathered)) {
                AbsConfig d = c;
                d.r[s] = AbsRobot{me.color, PKind::Move, Color::White, v.disp, true};
                d.r[1 - s].disp = od;
                d.gathered = v.post_gathered;
                // teq carries over (both targets still pending, unchanged).
                eb.emit(d, s, ActKind::Advance, v.var);
            }
        }

        // EndMove with actual motion.
        for (Disp od : other_variants(false)) {
            AbsConfig d = c;
            d.r[s] = waiting_robot(me.color);
            d.r[1 - s].disp = od;
            d.gathered = false;
            d.teq = TgtEq::NA;
            eb.emit(d, s, ActKind::End, MoveVar::Short);
        }
        if (!c.gathered && (me.disp == Disp::Other || me.disp == Disp::Stale)) {
            for (Disp od : other_variants(true)) {
                AbsConfig d = c;
                d.r[s] = waiting_robot(me.color);
                d.r[1 - s].disp = od;
                d.gathered = true;
                d.teq = TgtEq::NA;
                eb.emit(d, s, ActKind::End, MoveVar::Gather);
            }
        }
    }
}

} // namespace detail

// All coherent abstract configurations plus every abstract successor under a
// single micro-step of either robot or a simultaneous LOOK pair. Move endings
// branch on whether gathering is achieved; pending-target dispositions of the
// bystander robot re-branch whenever the mover's position changes.
inline AbstractGraph build_graph(const Protocol& proto) {
    AbstractGraph g;
    g.proto = proto;

    std::vector<AbsRobot> robots;
    for (Color col : {Color::White, Color::Black}) {
        robots.push_back(detail::waiting_robot(col));
        for (Color pend : {Color::White, Color::Black})
            for (Disp d : {Disp::None, Disp::Zero, Disp::Other, Disp::Half, Disp::Stale})
                robots.push_back(AbsRobot{col, PKind::Compute, pend, d, false});
        for (Disp d : {Disp::Zero, Disp::Other, Disp::Half, Disp::Stale})
            for (bool adv : {false, true})
                robots.push_back(AbsRobot{col, PKind::Move, Color::White, d, adv});
    }

    for (std::size_t i = 0; i < robots.size(); ++i)
        for (std::size_t j = 0; j < robots.size(); ++j) {
            if (robots[j].key() < robots[i].key()) continue;
            for (bool gath : {false, true})
                for (TgtEq t : {TgtEq::NA, TgtEq::Eq, TgtEq::Neq}) {
                    AbsConfig c{{robots[i], robots[j]}, gath, t};
                    if (!is_coherent(c)) continue;
                    if (g.index.count(c.key())) continue;
                    g.index.emplace(c.key(), static_cast<std::uint32_t>(g.nodes.size()));
                    g.nodes.push_back(c);
                }
        }

    g.adj.resize(g.nodes.size());
    g.radj.resize(g.nodes.size());
    for (std::uint32_t id = 0; id < g.nodes.size(); ++id) detail::successors(g, id);

    AbsConfig clean{{detail::waiting_robot(Color::White), detail::waiting_robot(Color::White)}, false, TgtEq::NA};
    clean.canonicalize();
    g.clean_start = g.id_of(clean);

    g.reachable.assign(g.nodes.size(), 0);
    std::vector<std::uint32_t> stack{g.clean_start};
    g.reachable[g.clean_start] = 1;
    while (!stack.empty()) {
        std::uint32_t v = stack.back();
        stack.pop_back();
        for (const AbsEdge& e : g.adj[v])
            if (!g.reachable[e.dst]) {
                g.reachable[e.dst] = 1;
                stack.push_back(e.dst);
            }
    }
    return g;
}

} // namespace gather2
