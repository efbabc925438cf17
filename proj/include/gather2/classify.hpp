#pragma once

#include "gather2/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace gather2 {

enum class Subset : std::uint8_t { SYM, ASYM, FAULTY1, FAULTY2, ILLEGAL, GATHERED };

inline const char* subset_name(Subset s) {
    switch (s) {
    case Subset::SYM: return "SYM";
    case Subset::ASYM: return "ASYM";
    case Subset::FAULTY1: return "FAULTY1";
    case Subset::FAULTY2: return "FAULTY2";
    case Subset::ILLEGAL: return "ILLEGAL";
    case Subset::GATHERED: return "GATHERED";
    }
    return "?";
}

struct Classification {
    std::vector<Subset> label;
    std::vector<char> faulty;     // both robots pending displacement toward provably different targets
    std::vector<char> can_resync; // a path to an equal-colors nominal configuration exists
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

// Subset labels, derived from the graph rather than transcribed:
//   GATHERED - gathered and quiescent (no pending displacement), any reachability
//   ILLEGAL  - everything else unreachable from the clean start
//   FAULTY1  - conflicting-target region that can never re-equalize colors,
//              plus its locked remnants outside the closed ASYM region
//   FAULTY2  - conflicting-target region that can still re-synchronize
//   ASYM     - the largest locked, conflict-free region closed under steps
//              (up to entering GATHERED)
//   SYM      - remaining reachable region; contains the clean start
inline Classification classify(const AbstractGraph& g) {
    const std::size_t n = g.nodes.size();
    Classification cl;
    cl.label.assign(n, Subset::SYM);
    cl.faulty.assign(n, 0);
    cl.can_resync.assign(n, 0);

    // Backward reachability toward equal-colors nominal configurations.
    std::deque<std::uint32_t> work;
    for (std::uint32_t v = 0; v < n; ++v) {
        const AbsConfig& c = g.nodes[v];
        cl.faulty[v] = c.r[0].pending_displacement() && c.r[1].pending_displacement() && c.teq == TgtEq::Neq;
        if (!c.gathered && c.r[0].color == c.r[1].color) {
            cl.can_resync[v] = 1;
            work.push_back(v);
        }
    }
    while (!work.empty()) {
        std::uint32_t v = work.front();
        work.pop_front();
        for (std::uint32_t p : g.radj[v])
            if (!cl.can_resync[p]) {
                cl.can_resync[p] = 1;
                work.push_back(p);
            }
    }

    std::vector<char> is_gathered_label(n, 0), in_asym(n, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        const AbsConfig& c = g.nodes[v];
        if (c.gathered && c.quiescent()) {
            cl.label[v] = Subset::GATHERED;
            is_gathered_label[v] = 1;
        } else if (!g.reachable[v]) {
            cl.label[v] = Subset::ILLEGAL;
        } else if (cl.faulty[v]) {
            cl.label[v] = cl.can_resync[v] ? Subset::FAULTY2 : Subset::FAULTY1;
        } else if (!cl.can_resync[v]) {
            in_asym[v] = 1; // candidate; refined below
        } else {
            cl.label[v] = Subset::SYM;
        }
    }

    // ASYM is the greatest locked conflict-free region closed under steps
    // (entering GATHERED is allowed); candidates with an escaping edge fall
    // back into FAULTY1.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!in_asym[v]) continue;
            for (const AbsEdge& e : g.adj[v]) {
                if (!in_asym[e.dst] && !is_gathered_label[e.dst]) {
                    in_asym[v] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        if (cl.label[v] == Subset::GATHERED || cl.label[v] == Subset::ILLEGAL) continue;
        if (cl.faulty[v]) continue; // already FAULTY1/FAULTY2
        if (!cl.can_resync[v]) cl.label[v] = in_asym[v] ? Subset::ASYM : Subset::FAULTY1;
    }

    // Totality audit: the rules above assign every node exactly once; verify
    // the clean start landed where it must.
    if (cl.label[g.clean_start] != Subset::SYM)
        cl.failures.push_back("clean start not classified SYM");
    return cl;
}

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct StructureReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

namespace detail {

inline std::string node_str(const AbstractGraph& g, std::uint32_t v) {
    return "#" + std::to_string(v) + " {" + config_label(g.nodes[v]) + "}";
}

// Elementary cycle enumeration (Johnson) restricted to a node subset.
// visit(cycle-as-node-ids) -> bool: return false to stop.
template <typename Visit>
inline bool enumerate_cycles(const AbstractGraph& g, const std::vector<char>& in_set, Visit&& visit,
                             std::size_t max_cycles = 2'000'000) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::uint32_t>> succ(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!in_set[v]) continue;
        std::unordered_set<std::uint32_t> uniq;
        for (const AbsEdge& e : g.adj[v])
            if (in_set[e.dst]) uniq.insert(e.dst);
        succ[v].assign(uniq.begin(), uniq.end());
        std::sort(succ[v].begin(), succ[v].end());
    }

    std::size_t count = 0;
    std::vector<std::uint32_t> stack;
    std::vector<char> blocked(n, 0);
    std::vector<std::unordered_set<std::uint32_t>> block_map(n);

    std::function<bool(std::uint32_t, std::uint32_t)> circuit = [&](std::uint32_t v,
                                                                    std::uint32_t start) -> bool {
        bool found = false;
        stack.push_back(v);
        blocked[v] = 1;
        for (std::uint32_t w : succ[v]) {
            if (w < start) continue;
            if (w == start) {
                if (++count > max_cycles) throw std::runtime_error("cycle enumeration limit exceeded");
                if (!visit(stack)) throw std::runtime_error("cycle visitor aborted");
                found = true;
            } else if (!blocked[w]) {
                if (circuit(w, start)) found = true;
            }
        }
        if (found) {
            std::function<void(std::uint32_t)> unblock = [&](std::uint32_t u) {
                blocked[u] = 0;
                for (std::uint32_t w : block_map[u]) {
                    if (blocked[w]) unblock(w);
                }
                block_map[u].clear();
            };
            unblock(v);
        } else {
            for (std::uint32_t w : succ[v])
                if (w >= start) block_map[w].insert(v);
        }
        stack.pop_back();
        return found;
    };

    for (std::uint32_t s = 0; s < n; ++s) {
        if (!in_set[s] || succ[s].empty()) continue;
        std::fill(blocked.begin(), blocked.end(), 0);
        for (auto& bm : block_map) bm.clear();
        stack.clear();
        circuit(s, s);
    }
    return true;
}

} // namespace detail

// Edge-level refinement of a node cycle: all parallel-edge selections.
struct CyclePath {
    std::vector<std::uint32_t> nodes; // v0, v1, ..., v_{k-1}; edge i: v_i -> v_{i+1 mod k}
    std::vector<AbsEdge> edges;
};

namespace detail {

template <typename Visit>
inline void expand_edge_choices(const AbstractGraph& g, const std::vector<std::uint32_t>& cyc, Visit&& visit,
                                std::size_t cap = 256) {
    const std::size_t k = cyc.size();
    std::vector<std::vector<AbsEdge>> options(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t from = cyc[i], to = cyc[(i + 1) % k];
        for (const AbsEdge& e : g.adj[from])
            if (e.dst == to) options[i].push_back(e);
    }
    std::size_t total = 1;
    for (const auto& o : options) {
        total *= o.size();
        if (total > cap) { total = cap; break; }
    }
    std::vector<std::size_t> idx(k, 0);
    std::size_t produced = 0;
    for (;;) {
        CyclePath p;
        p.nodes = cyc;
        for (std::size_t i = 0; i < k; ++i) p.edges.push_back(options[i][idx[i]]);
        visit(p);
        if (++produced >= cap) return;
        std::size_t i = 0;
        while (i < k && ++idx[i] == options[i].size()) idx[i++] = 0;
        if (i == k) return;
    }
}

// Robot-identity-aware fairness analysis. Flips along the cycle permute the
// slot-to-robot assignment; a cycle whose composed permutation is a swap only
// repeats as its square, so analysis doubles it.
struct CycleFairness {
    bool parity_swap = false;
    // Per global robot: counts of actions, and of non-Advance actions.
    std::array<int, 2> acts{0, 0};
    std::array<int, 2> progress_acts{0, 0};
    bool motion = false; // any edge with an actual position change

    bool fair() const {
        for (int r = 0; r < 2; ++r)
            if (progress_acts[r] == 0) return false;
        return true;
    }
};

inline CycleFairness analyze_fairness(const CyclePath& p) {
    CycleFairness f;
    int perm = 0; // current slot s holds global robot (s ^ perm)
    int laps = 1;
    // First compute total parity.
    for (const AbsEdge& e : p.edges)
        if (e.flip) f.parity_swap = !f.parity_swap;
    if (f.parity_swap) laps = 2;
    for (int lap = 0; lap < laps; ++lap) {
        for (const AbsEdge& e : p.edges) {
            bool moves = e.var == MoveVar::Partial || e.var == MoveVar::Arrive ||
                         e.var == MoveVar::HitOther || e.var == MoveVar::Short || e.var == MoveVar::Gather;
            if (moves) f.motion = true;
            if (e.slot < 0) {
                for (int r = 0; r < 2; ++r) {
                    ++f.acts[r];
                    ++f.progress_acts[r];
                }
            } else {
                int robot = (static_cast<int>(e.slot)) ^ perm;
                ++f.acts[robot];
                if (e.act != ActKind::Advance) ++f.progress_acts[robot];
            }
            if (e.flip) perm ^= 1;
        }
    }
    return f;
}

} // namespace detail

// The five structural assertions, verified on the labeled graph. Gathering
// entries (edges into GATHERED) are success states, not exits: GATHERED is
// the shared terminal of every subset.
inline StructureReport check_structure(const AbstractGraph& g, const Classification& cl) {
    StructureReport rep;
    auto lab = [&](std::uint32_t v) { return cl.label[v]; };

    { // (i) ASYM closure
        CheckResult c{"asym-closure", true, ""};
        for (std::uint32_t v = 0; v < g.nodes.size() && c.pass; ++v) {
            if (lab(v) != Subset::ASYM) continue;
            for (const AbsEdge& e : g.adj[v])
                if (lab(e.dst) != Subset::ASYM && lab(e.dst) != Subset::GATHERED) {
                    c.pass = false;
                    c.detail = "ASYM exits at " + detail::node_str(g, v) + " -> " + detail::node_str(g, e.dst) +
                               " [" + subset_name(lab(e.dst)) + "]";
                    break;
                }
        }
        if (c.pass) c.detail = "every ASYM edge stays in ASYM or enters GATHERED";
        rep.checks.push_back(std::move(c));
    }

    { // (ii) FAULTY1 exits
        CheckResult c{"faulty1-exits-asym", true, ""};
        std::size_t exits = 0;
        for (std::uint32_t v = 0; v < g.nodes.size() && c.pass; ++v) {
            if (lab(v) != Subset::FAULTY1) continue;
            for (const AbsEdge& e : g.adj[v]) {
                Subset d = lab(e.dst);
                if (d == Subset::FAULTY1) continue;
                if (d == Subset::GATHERED) continue;
                ++exits;
                if (d != Subset::ASYM) {
                    c.pass = false;
                    c.detail = "FAULTY1 exits to " + std::string(subset_name(d)) + " at " +
                               detail::node_str(g, v) + " -> " + detail::node_str(g, e.dst);
                    break;
                }
            }
        }
        if (c.pass)
            c.detail = "all " + std::to_string(exits) + " cross-subset FAULTY1 exits target ASYM";
        rep.checks.push_back(std::move(c));
    }

    { // (iii) ILLEGAL: no fair cycle, exits drain into already-valid subsets
        CheckResult c{"illegal-acyclic-and-exits", true, ""};
        std::vector<char> in_illegal(g.nodes.size(), 0);
        for (std::uint32_t v = 0; v < g.nodes.size(); ++v) in_illegal[v] = lab(v) == Subset::ILLEGAL;
        std::string fair_witness;
        try {
            detail::enumerate_cycles(g, in_illegal, [&](const std::vector<std::uint32_t>& cyc) {
                bool any_fair = false;
                detail::expand_edge_choices(g, cyc, [&](const CyclePath& p) {
                    if (detail::analyze_fairness(p).fair()) any_fair = true;
                });
                if (any_fair && fair_witness.empty()) {
                    fair_witness = "fair cycle inside ILLEGAL through " + detail::node_str(g, cyc[0]);
                    return false;
                }
                return true;
            });
        } catch (const std::exception& e) {
            if (fair_witness.empty()) fair_witness = e.what();
        }
        // Exits land in subsets whose validity never depends on ILLEGAL's:
        // SYM and FAULTY1 for program-pointer corruptions (the cases the
        // original argument enumerates), plus ASYM/FAULTY2/GATHERED entries
        // that only arise from corrupted pending data.
        std::map<Subset, std::size_t> exit_dist;
        bool unlabeled_exit = false;
        for (std::uint32_t v = 0; v < g.nodes.size(); ++v) {
            if (lab(v) != Subset::ILLEGAL) continue;
            for (const AbsEdge& e : g.adj[v])
                if (lab(e.dst) != Subset::ILLEGAL) {
                    ++exit_dist[lab(e.dst)];
                    if (lab(e.dst) == Subset::ILLEGAL) unlabeled_exit = true;
                }
        }
        std::ostringstream os;
        os << "exit distribution:";
        for (auto& [s, k] : exit_dist) os << " " << subset_name(s) << "=" << k;
        if (!fair_witness.empty()) {
            c.pass = false;
            c.detail = fair_witness;
        } else if (unlabeled_exit) {
            c.pass = false;
            c.detail = "ILLEGAL exit without a valid destination; " + os.str();
        } else {
            c.detail = "no fair cycle inside ILLEGAL; every exit drains into a validated subset; " + os.str();
        }
        rep.checks.push_back(std::move(c));
    }

    { // (iv) GATHERED closed and motionless
        CheckResult c{"gathered-closed-motionless", true, ""};
        for (std::uint32_t v = 0; v < g.nodes.size() && c.pass; ++v) {
            if (lab(v) != Subset::GATHERED) continue;
            for (const AbsEdge& e : g.adj[v]) {
                bool moves = e.var == MoveVar::Partial || e.var == MoveVar::Arrive ||
                             e.var == MoveVar::HitOther || e.var == MoveVar::Short || e.var == MoveVar::Gather;
                if (lab(e.dst) != Subset::GATHERED || moves) {
                    c.pass = false;
                    c.detail = "GATHERED not closed/motionless at " + detail::node_str(g, v) + " -> " +
                               detail::node_str(g, e.dst);
                    break;
                }
            }
        }
        if (c.pass) c.detail = "GATHERED is closed under all actions and admits no displacement";
        rep.checks.push_back(std::move(c));
    }

    { // (v) terminal SYM cannot slide into FAULTY2 while gathered
        CheckResult c{"terminal-sym-avoids-faulty2", true, ""};
        std::deque<std::uint32_t> work;
        std::vector<char> seen(g.nodes.size(), 0);
        for (std::uint32_t v = 0; v < g.nodes.size(); ++v)
            if (lab(v) == Subset::SYM && g.nodes[v].gathered) {
                seen[v] = 1;
                work.push_back(v);
            }
        while (!work.empty() && c.pass) {
            std::uint32_t v = work.front();
            work.pop_front();
            for (const AbsEdge& e : g.adj[v]) {
                if (lab(e.dst) == Subset::FAULTY2 && g.nodes[e.dst].gathered) {
                    c.pass = false;
                    c.detail = "gathered path from terminal SYM reaches FAULTY2 at " +
                               detail::node_str(g, e.dst);
                    break;
                }
                if (!seen[e.dst] && g.nodes[e.dst].gathered) {
                    seen[e.dst] = 1;
                    work.push_back(e.dst);
                }
            }
        }
        if (c.pass) c.detail = "no gathered path from terminal SYM configurations enters FAULTY2";
        rep.checks.push_back(std::move(c));
    }

    return rep;
}

} // namespace gather2
