#pragma once

#include "gather2/classify.hpp"
#include "gather2/interval.hpp"

#include <functional>
#include <set>

namespace gather2 {

// ---------------------------------------------------------------------------
// Certification projection: cycle certificates read only the action labels,
// the colors, and the gathered flags, so cycles are enumerated on a quotient
// of the abstract graph that forgets dispositions, the advanced bit, and
// target equality. Every abstract cycle projects onto a quotient cycle with
// identical labels, so certifying all quotient cycles covers them all.
// ---------------------------------------------------------------------------

struct QRobot {
    Color color = Color::White;
    PKind kind = PKind::Wait;
    Color pending = Color::White;
    bool has_target = false;

    bool operator==(const QRobot&) const = default;

    std::uint16_t key() const {
        return static_cast<std::uint16_t>(static_cast<int>(color) | (static_cast<int>(kind) << 1) |
                                          (static_cast<int>(pending) << 3) |
                                          (static_cast<int>(has_target) << 4));
    }
};

struct QNode {
    std::array<QRobot, 2> r;
    bool gathered = false;

    bool operator==(const QNode&) const = default;

    std::uint32_t key() const {
        return static_cast<std::uint32_t>(r[0].key()) | (static_cast<std::uint32_t>(r[1].key()) << 5) |
               (static_cast<std::uint32_t>(gathered) << 10);
    }
};

inline QRobot project_robot(const AbsRobot& r) {
    return QRobot{r.color, r.kind, r.kind == PKind::Compute ? r.pending : Color::White, r.has_target()};
}

inline std::string qnode_label(const QNode& n) {
    auto one = [](const QRobot& q) {
        std::string s(1, color_char(q.color));
        s += ":";
        switch (q.kind) {
        case PKind::Wait: s += "W"; break;
        case PKind::Compute:
            s += "C(";
            s += color_char(q.pending);
            s += q.has_target ? ",tgt)" : ")";
            break;
        case PKind::Move: s += "M"; break;
        }
        return s;
    };
    return one(n.r[0]) + " " + one(n.r[1]) + (n.gathered ? " G" : "");
}

struct QEdge {
    std::uint32_t dst = 0;
    std::int8_t slot = -1;
    ActKind act = ActKind::Look;
    MoveVar var = MoveVar::NoVar;
    bool flip = false;

    bool operator==(const QEdge&) const = default;
};

struct QGraph {
    std::vector<QNode> nodes;
    std::vector<std::vector<QEdge>> adj;
    std::vector<char> in_domain; // projected from reachable full nodes
    std::unordered_map<std::uint32_t, std::uint32_t> index;
};

// Projects the reachable region of the abstract graph.
inline QGraph build_qgraph(const AbstractGraph& g) {
    QGraph q;
    std::vector<std::uint32_t> qid(g.nodes.size());
    std::vector<char> swapbit(g.nodes.size(), 0);
    for (std::uint32_t v = 0; v < g.nodes.size(); ++v) {
        QNode n{{project_robot(g.nodes[v].r[0]), project_robot(g.nodes[v].r[1])}, g.nodes[v].gathered};
        bool sw = n.r[1].key() < n.r[0].key();
        if (sw) std::swap(n.r[0], n.r[1]);
        auto [it, fresh] = q.index.emplace(n.key(), static_cast<std::uint32_t>(q.nodes.size()));
        if (fresh) {
            q.nodes.push_back(n);
            q.adj.emplace_back();
            q.in_domain.push_back(0);
        }
        qid[v] = it->second;
        swapbit[v] = sw;
        if (g.reachable[v]) q.in_domain[it->second] = 1;
    }
    std::vector<std::set<std::uint64_t>> seen(q.nodes.size());
    for (std::uint32_t v = 0; v < g.nodes.size(); ++v) {
        if (!g.reachable[v]) continue;
        for (const AbsEdge& e : g.adj[v]) {
            QEdge qe;
            qe.dst = qid[e.dst];
            qe.slot = e.slot < 0 ? -1 : static_cast<std::int8_t>(e.slot ^ swapbit[v]);
            qe.act = e.act;
            qe.var = e.var;
            qe.flip = (swapbit[v] ^ e.flip ^ swapbit[e.dst]) != 0;
            std::uint64_t k = static_cast<std::uint64_t>(qe.dst) << 16 |
                              static_cast<std::uint64_t>(static_cast<std::uint8_t>(qe.slot + 1)) << 8 |
                              static_cast<std::uint64_t>(static_cast<int>(qe.act)) << 4 |
                              static_cast<std::uint64_t>(static_cast<int>(qe.var)) << 1 |
                              static_cast<std::uint64_t>(qe.flip);
            if (seen[qid[v]].insert(k).second) q.adj[qid[v]].push_back(qe);
        }
    }
    return q;
}

// ---------------------------------------------------------------------------
// Symbolic path execution
// ---------------------------------------------------------------------------

struct PathStep {
    int robot = 0; // global robot identity; -1 = simultaneous look
    ActKind act = ActKind::Look;
    MoveVar var = MoveVar::NoVar;
    std::array<LookShape, 2> shape{}; // per global robot, for Look/Both
};

struct IRobotState {
    AffIval pos;
    PKind kind = PKind::Wait;
    Color pending = Color::White;
    bool has_target = false;
    AffIval target;
    AffIval origin;
};

struct IState {
    std::array<IRobotState, 2> r;

    bool operator==(const IState& o) const {
        for (int i = 0; i < 2; ++i) {
            const IRobotState& a = r[i];
            const IRobotState& b = o.r[i];
            if (a.kind != b.kind || a.pending != b.pending || a.has_target != b.has_target) return false;
            if (!(a.pos == b.pos)) return false;
            if (a.has_target && !(a.target == b.target)) return false;
            if (a.kind == PKind::Move && !(a.origin == b.origin)) return false;
        }
        return true;
    }
};

struct ExecLeaf {
    Rho region;
    AffIval sep; // signed: pos[1] - pos[0]; starts at +x
};

struct IntervalOutcome {
    std::vector<ExecLeaf> leaves;

    struct Query {
        bool realizable = false;
        Rat sep_lo, sep_hi; // hull over matching leaves
    };

    // Concrete (x, delta) query.
    Query at(const Rat& x, const Rat& d) const {
        Query out;
        Rat rho = d / x;
        for (const ExecLeaf& l : leaves) {
            if (!l.region.contains(rho)) continue;
            Rat lo = l.sep.lo.eval(x, d), hi = l.sep.hi.eval(x, d);
            if (!out.realizable) {
                out = {true, lo, hi};
            } else {
                out.sep_lo = rat_min(out.sep_lo, lo);
                out.sep_hi = rat_max(out.sep_hi, hi);
            }
        }
        return out;
    }
};

namespace ivd {

// Hull of feasible EndMove endpoints: on the remaining segment from the
// current position toward the target, total displacement from the origin at
// least min(delta, full target distance).
inline void end_hull(const Rho& region, const AffIval& P, const AffIval& O, const AffIval& T,
                     const std::function<void(const Rho&, const AffIval&)>& cont) {
    Aff d = Aff::delta();
    auto dir_plus = [&](const Rho& r0, const std::function<void(const Rho&, const AffIval&)>& k) {
        aff_min(r0, O.lo + d, T.lo, [&](const Rho& r1, const Aff& m) {
            aff_max(r1, P.lo, m, [&](const Rho& r2, const Aff& lo) { k(r2, AffIval{lo, T.hi}); });
        });
    };
    auto dir_minus = [&](const Rho& r0, const std::function<void(const Rho&, const AffIval&)>& k) {
        aff_max(r0, O.hi - d, T.hi, [&](const Rho& r1, const Aff& m) {
            aff_min(r1, P.hi, m, [&](const Rho& r2, const Aff& hi) { k(r2, AffIval{T.lo, hi}); });
        });
    };
    split_sign(region, T.lo - P.hi, [&](const Rho& r1, int s1) {
        if (s1 >= 0) {
            dir_plus(r1, cont);
            return;
        }
        split_sign(r1, P.lo - T.hi, [&](const Rho& r2, int s2) {
            if (s2 >= 0) {
                dir_minus(r2, cont);
                return;
            }
            // Direction genuinely ambiguous within the intervals: cover both.
            dir_plus(r2, [&](const Rho& r3, const AffIval& a) {
                dir_minus(r3, [&](const Rho& r4, const AffIval& b) { ival_hull(r4, a, b, cont); });
            });
        });
    });
}

} // namespace ivd

// Executes a step sequence with exact worst-case interval propagation on the
// line through both robots. Region splits are on rho = delta/x; infeasible
// branches (e.g. a non-gathering ending of a move the rule forces to finish
// on the other robot) are pruned.
inline IntervalOutcome run_interval_path(const std::vector<PathStep>& steps, const IState& init) {
    struct Branch {
        Rho region;
        IState st;
    };
    std::vector<Branch> work{{Rho::all(), init}};

    // Per fixed rho the execution is deterministic, so adjacent regions that
    // resolved to the same state are one cell; coalescing them keeps the
    // branch count linear in the number of genuine rho-breakpoints.
    auto coalesce = [](std::vector<Branch>& bs) {
        auto key = [](const std::optional<Rat>& r) { return r ? *r : Rat(-1); };
        std::sort(bs.begin(), bs.end(), [&](const Branch& a, const Branch& b) {
            if (!a.region.lo != !b.region.lo) return !a.region.lo;
            return key(a.region.lo) < key(b.region.lo);
        });
        std::vector<Branch> merged;
        for (Branch& b : bs) {
            if (!merged.empty()) {
                Branch& m = merged.back();
                bool adjacent = m.region.hi && b.region.lo && *m.region.hi >= *b.region.lo;
                if (adjacent && m.st == b.st) {
                    if (!b.region.hi)
                        m.region.hi.reset();
                    else if (m.region.hi && *b.region.hi > *m.region.hi)
                        m.region.hi = b.region.hi;
                    continue;
                }
            }
            merged.push_back(std::move(b));
        }
        bs = std::move(merged);
    };

    auto apply_look = [](IState& st, int g, const LookShape& sh) {
        IRobotState& me = st.r[g];
        const IRobotState& ot = st.r[1 - g];
        me.kind = PKind::Compute;
        me.pending = sh.new_color;
        me.has_target = sh.shape != TargetShape::None;
        switch (sh.shape) {
        case TargetShape::None: break;
        case TargetShape::Zero: me.target = me.pos; break;
        case TargetShape::Half: me.target = (me.pos + ot.pos).scaled_nonneg(Rat(1, 2)); break;
        case TargetShape::Other: me.target = ot.pos; break;
        case TargetShape::Frac:
            me.target = me.pos.scaled_nonneg(Rat(1) - sh.frac) + ot.pos.scaled_nonneg(sh.frac);
            break;
        }
    };

    for (const PathStep& s : steps) {
        std::vector<Branch> next;
        auto out = [&](const Rho& r, IState st) { next.push_back({r, std::move(st)}); };
        for (Branch& br : work) {
            IState st = br.st;
            switch (s.act) {
            case ActKind::Look:
                apply_look(st, s.robot, s.shape[s.robot]);
                out(br.region, std::move(st));
                break;
            case ActKind::Both:
                apply_look(st, 0, s.shape[0]);
                apply_look(st, 1, s.shape[1]);
                out(br.region, std::move(st));
                break;
            case ActKind::Finish: {
                IRobotState& me = st.r[s.robot];
                if (me.has_target) {
                    me.kind = PKind::Move;
                    me.origin = me.pos;
                } else {
                    me.kind = PKind::Wait;
                }
                out(br.region, std::move(st));
                break;
            }
            case ActKind::Advance: {
                const int g = s.robot;
                if (s.var == MoveVar::Noop) {
                    out(br.region, std::move(st));
                    break;
                }
                if (s.var == MoveVar::Partial) {
                    ivd::ival_hull(br.region, st.r[g].pos, st.r[g].target,
                                   [&](const Rho& r, const AffIval& h) {
                                       IState st2 = st;
                                       st2.r[g].pos = h;
                                       out(r, std::move(st2));
                                   });
                    break;
                }
                if (s.var == MoveVar::Arrive) {
                    st.r[g].pos = st.r[g].target;
                    out(br.region, std::move(st));
                    break;
                }
                // HitOther
                ivd::ival_hull(br.region, st.r[g].pos, st.r[g].target, [&](const Rho& r, const AffIval& h) {
                    ivd::ival_intersect(r, h, st.r[1 - g].pos, [&](const Rho& r2, const AffIval& meet) {
                        IState st2 = st;
                        st2.r[g].pos = meet;
                        st2.r[1 - g].pos = meet;
                        out(r2, std::move(st2));
                    });
                });
                break;
            }
            case ActKind::End: {
                const int g = s.robot;
                auto leave = [&](const Rho& r, IState st2) {
                    st2.r[g].kind = PKind::Wait;
                    st2.r[g].has_target = false;
                    out(r, std::move(st2));
                };
                if (s.var == MoveVar::Noop) {
                    leave(br.region, st);
                    break;
                }
                ivd::end_hull(br.region, st.r[g].pos, st.r[g].origin, st.r[g].target,
                              [&](const Rho& r, const AffIval& e) {
                                  if (s.var == MoveVar::Gather) {
                                      ivd::ival_intersect(r, e, st.r[1 - g].pos,
                                                          [&](const Rho& r2, const AffIval& meet) {
                                                              IState st2 = st;
                                                              st2.r[g].pos = meet;
                                                              st2.r[1 - g].pos = meet;
                                                              leave(r2, std::move(st2));
                                                          });
                                      return;
                                  }
                                  // Short: a non-gathering ending is impossible when
                                  // the endpoint is forced onto the other robot.
                                  if (e.is_point() && st.r[1 - g].pos.is_point() &&
                                      e.lo == st.r[1 - g].pos.lo)
                                      return;
                                  IState st2 = st;
                                  st2.r[g].pos = e;
                                  leave(r, std::move(st2));
                              });
                break;
            }
            }
        }
        coalesce(next);
        work = std::move(next);
        if (work.empty()) break;
        if (work.size() > 4096) throw std::runtime_error("interval execution branch explosion");
    }

    IntervalOutcome res;
    for (Branch& br : work) res.leaves.push_back({br.region, br.st.r[1].pos - br.st.r[0].pos});
    return res;
}

// ---------------------------------------------------------------------------
// Decrease analysis
// ---------------------------------------------------------------------------

struct DecreasePiece {
    Rho region;
    Aff bound; // worst-case separation decrease >= bound on the region
};

// Every piece must admit a uniform positive floor in delta on its region:
// inf bound/delta > 0. This is what makes infinite repetition impossible.
inline bool piece_has_delta_floor(const DecreasePiece& p) {
    const Aff& b = p.bound;
    if (b.cx < 0) return false;
    if (p.region.hi) return b.cx / *p.region.hi + b.cd > 0;
    return b.cd > 0;
}

inline std::vector<DecreasePiece> decrease_pieces(const ExecLeaf& leaf) {
    std::vector<DecreasePiece> out;
    ivd::split_sign(leaf.region, leaf.sep.lo, [&](const Rho& r1, int s1) {
        Aff alo = s1 >= 0 ? leaf.sep.lo : Aff::zero() - leaf.sep.lo;
        ivd::split_sign(r1, leaf.sep.hi, [&](const Rho& r2, int s2) {
            Aff ahi = s2 >= 0 ? leaf.sep.hi : Aff::zero() - leaf.sep.hi;
            ivd::aff_max(r2, alo, ahi, [&](const Rho& r3, const Aff& m) {
                out.push_back({r3, Aff::sep_x() - m});
            });
        });
    });
    return out;
}

// Pretty bound expressions matched against the certificate shapes in use.
inline std::string match_bound_template(const std::vector<DecreasePiece>& pieces) {
    struct Cand {
        std::string name;
        std::function<std::vector<std::pair<Rho, Aff>>(const Rho&)> resolve;
    };
    auto minmax = [](const Rho& r, const Aff& a, const Aff& b) {
        std::vector<std::pair<Rho, Aff>> out;
        ivd::aff_min(r, a, b, [&](const Rho& rr, const Aff& v) { out.push_back({rr, v}); });
        return out;
    };
    std::vector<Cand> cands{
        {"min(x/2, 3*delta)",
         [&](const Rho& r) { return minmax(r, Aff{Rat(1, 2), Rat(0)}, Aff{Rat(0), Rat(3)}); }},
        {"2*delta", [&](const Rho& r) { return std::vector<std::pair<Rho, Aff>>{{r, Aff{Rat(0), Rat(2)}}}; }},
        {"min(x, delta)", [&](const Rho& r) { return minmax(r, Aff{Rat(1), Rat(0)}, Aff{Rat(0), Rat(1)}); }},
        {"min(x/2, delta)",
         [&](const Rho& r) { return minmax(r, Aff{Rat(1, 2), Rat(0)}, Aff{Rat(0), Rat(1)}); }},
        {"delta", [&](const Rho& r) { return std::vector<std::pair<Rho, Aff>>{{r, Aff{Rat(0), Rat(1)}}}; }},
    };
    for (const Cand& c : cands) {
        bool all = true;
        for (const DecreasePiece& p : pieces) {
            for (auto& [rr, want] : c.resolve(p.region)) {
                Sgn s = sign_on(p.bound - want, rr);
                if (s != Sgn::Pos && s != Sgn::Zero) {
                    all = false;
                    break;
                }
            }
            if (!all) break;
        }
        if (all) return c.name;
    }
    std::string raw = "pieces:";
    for (const DecreasePiece& p : pieces)
        raw += " {" + p.region.str() + ": " + p.bound.str() + "}";
    return raw;
}

// ---------------------------------------------------------------------------
// Cycle certification
// ---------------------------------------------------------------------------

struct CycleCertificate {
    enum class Kind : std::uint8_t { Unfair, Motionless, Decreasing, Vacuous, Failed };
    Kind kind = Kind::Unfair;
    std::vector<std::uint32_t> qnodes;
    std::string text;
};

inline const char* cert_kind_name(CycleCertificate::Kind k) {
    switch (k) {
    case CycleCertificate::Kind::Unfair: return "unfair";
    case CycleCertificate::Kind::Motionless: return "motionless";
    case CycleCertificate::Kind::Decreasing: return "decreasing";
    case CycleCertificate::Kind::Vacuous: return "vacuous";
    case CycleCertificate::Kind::Failed: return "FAILED";
    }
    return "?";
}

struct CertifyOptions {
    std::size_t max_failures = 8;      // stop collecting details beyond this
    bool stop_on_first_failure = false;
    std::size_t max_node_cycles = 2'000'000;
    std::size_t edge_choice_cap = 512;
};

struct CertifyResult {
    std::size_t node_cycles = 0;
    std::size_t edge_cycles = 0;
    std::size_t unfair = 0, motionless = 0, decreasing = 0, vacuous = 0;
    std::size_t failed = 0;
    std::vector<CycleCertificate> failures;
    std::vector<CycleCertificate> samples;
    std::string abort; // nonempty if the enumeration itself gave up

    bool ok() const { return failed == 0 && abort.empty(); }
};

struct QCyclePath {
    std::vector<std::uint32_t> nodes;
    std::vector<QEdge> edges;
};

namespace detail {

struct QFairness {
    bool parity_swap = false;
    std::array<int, 2> progress_acts{0, 0};
    bool motion = false;

    bool fair() const { return progress_acts[0] > 0 && progress_acts[1] > 0; }
};

inline bool edge_moves(const QEdge& e) {
    return e.var == MoveVar::Partial || e.var == MoveVar::Arrive || e.var == MoveVar::HitOther ||
           e.var == MoveVar::Short || e.var == MoveVar::Gather;
}

inline QFairness analyze_qfairness(const QCyclePath& p) {
    QFairness f;
    for (const QEdge& e : p.edges)
        if (e.flip) f.parity_swap = !f.parity_swap;
    int laps = f.parity_swap ? 2 : 1;
    int perm = 0;
    for (int lap = 0; lap < laps; ++lap)
        for (const QEdge& e : p.edges) {
            if (edge_moves(e)) f.motion = true;
            if (e.slot < 0) {
                ++f.progress_acts[0];
                ++f.progress_acts[1];
            } else if (e.act != ActKind::Advance) {
                ++f.progress_acts[e.slot ^ perm];
            }
            if (e.flip) perm ^= 1;
        }
    return f;
}

// Builds the step sequence for the cycle rotated to an anchor node where no
// target is pending, doubling the lap when the identity parity is odd.
inline std::optional<std::pair<std::vector<PathStep>, IState>> prepare_qcycle(const QGraph& q,
                                                                              const Protocol& proto,
                                                                              const QCyclePath& p,
                                                                              bool parity_swap) {
    const std::size_t k = p.nodes.size();
    std::size_t rot = k;
    for (std::size_t i = 0; i < k; ++i) {
        const QNode& n = q.nodes[p.nodes[i]];
        if (!n.r[0].has_target && !n.r[1].has_target) {
            rot = i;
            break;
        }
    }
    if (rot == k) return std::nullopt;

    const QNode& anchor = q.nodes[p.nodes[rot]];
    IState init;
    init.r[0].pos = AffIval::point(Aff::zero());
    init.r[1].pos = AffIval::point(Aff::sep_x());
    for (int g = 0; g < 2; ++g) {
        init.r[g].kind = anchor.r[g].kind;
        init.r[g].pending = anchor.r[g].pending;
        init.r[g].has_target = false;
    }

    std::vector<PathStep> steps;
    int laps = parity_swap ? 2 : 1;
    int perm = 0;
    // Colors evolve along the path; track them to build look shapes.
    std::array<Color, 2> color{anchor.r[0].color, anchor.r[1].color};
    std::array<Color, 2> pend{anchor.r[0].pending, anchor.r[1].pending};
    for (int lap = 0; lap < laps; ++lap)
        for (std::size_t i = 0; i < k; ++i) {
            const QEdge& e = p.edges[(rot + i) % k];
            const QNode& src = q.nodes[p.nodes[(rot + i) % k]];
            PathStep st;
            st.act = e.act;
            st.var = e.var;
            if (e.slot < 0) {
                st.robot = -1;
                for (int slot = 0; slot < 2; ++slot) {
                    int g = slot ^ perm;
                    st.shape[g] = proto.look_shape(color[g], color[1 - g], src.gathered);
                    pend[g] = st.shape[g].new_color;
                }
                st.act = ActKind::Both;
            } else {
                int g = e.slot ^ perm;
                st.robot = g;
                if (e.act == ActKind::Look) {
                    st.shape[g] = proto.look_shape(color[g], color[1 - g], src.gathered);
                    pend[g] = st.shape[g].new_color;
                } else if (e.act == ActKind::Finish) {
                    color[g] = pend[g];
                }
            }
            steps.push_back(st);
            if (e.flip) perm ^= 1;
        }
    return std::make_pair(std::move(steps), std::move(init));
}

template <typename Visit>
inline void qcycles(const QGraph& q, Visit&& visit, std::size_t max_cycles) {
    const std::size_t n = q.nodes.size();
    std::vector<std::vector<std::uint32_t>> succ(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!q.in_domain[v]) continue;
        std::set<std::uint32_t> uniq;
        for (const QEdge& e : q.adj[v])
            if (q.in_domain[e.dst] && e.dst != v) uniq.insert(e.dst); // self-loops handled separately
        succ[v].assign(uniq.begin(), uniq.end());
    }
    std::size_t count = 0;
    std::vector<std::uint32_t> stack;
    std::vector<char> blocked(n, 0);
    std::vector<std::set<std::uint32_t>> bmap(n);
    std::function<bool(std::uint32_t, std::uint32_t)> circuit = [&](std::uint32_t v, std::uint32_t start) -> bool {
        bool found = false;
        stack.push_back(v);
        blocked[v] = 1;
        for (std::uint32_t w : succ[v]) {
            if (w < start) continue;
            if (w == start) {
                if (++count > max_cycles) throw std::runtime_error("cycle enumeration limit exceeded");
                visit(stack);
                found = true;
            } else if (!blocked[w]) {
                if (circuit(w, start)) found = true;
            }
        }
        if (found) {
            std::function<void(std::uint32_t)> unblock = [&](std::uint32_t u) {
                blocked[u] = 0;
                for (std::uint32_t w : bmap[u])
                    if (blocked[w]) unblock(w);
                bmap[u].clear();
            };
            unblock(v);
        } else {
            for (std::uint32_t w : succ[v])
                if (w >= start) bmap[w].insert(v);
        }
        stack.pop_back();
        return found;
    };
    for (std::uint32_t s = 0; s < n; ++s) {
        if (!q.in_domain[s] || succ[s].empty()) continue;
        std::fill(blocked.begin(), blocked.end(), 0);
        for (auto& b : bmap) b.clear();
        stack.clear();
        circuit(s, s);
    }
    // Self-loop cycles (single node): single-action cycles are unfair by
    // construction (the other robot never acts), but visit them for counting.
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!q.in_domain[v]) continue;
        bool self = false;
        for (const QEdge& e : q.adj[v])
            if (e.dst == v) self = true;
        if (self) {
            std::vector<std::uint32_t> single{v};
            visit(single);
        }
    }
}

template <typename Visit>
inline void expand_qedges(const QGraph& q, const std::vector<std::uint32_t>& cyc, Visit&& visit,
                          std::size_t cap) {
    const std::size_t k = cyc.size();
    std::vector<std::vector<QEdge>> options(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t from = cyc[i], to = cyc[(i + 1) % k];
        for (const QEdge& e : q.adj[from])
            if (e.dst == to) options[i].push_back(e);
        if (options[i].empty()) return;
        // A Partial advance's interval hull subsumes the Noop and Arrive
        // variants of the same (slot, flip): certifying it covers them.
        auto& opts = options[i];
        std::set<std::pair<int, bool>> partials;
        for (const QEdge& d : opts)
            if (d.act == ActKind::Advance && d.var == MoveVar::Partial)
                partials.insert({d.slot, d.flip});
        auto dominated = [&](const QEdge& e) {
            if (e.act != ActKind::Advance || (e.var != MoveVar::Noop && e.var != MoveVar::Arrive))
                return false;
            return partials.count({e.slot, e.flip}) != 0;
        };
        opts.erase(std::remove_if(opts.begin(), opts.end(), dominated), opts.end());
    }
    std::vector<std::size_t> idx(k, 0);
    std::size_t produced = 0;
    for (;;) {
        QCyclePath p;
        p.nodes = cyc;
        for (std::size_t i = 0; i < k; ++i) p.edges.push_back(options[i][idx[i]]);
        visit(p);
        if (++produced >= cap) return;
        std::size_t i = 0;
        while (i < k && ++idx[i] == options[i].size()) idx[i++] = 0;
        if (i == k) return;
    }
}

} // namespace detail

// Enumerates elementary cycles of the certification quotient and tags each
// as Unfair (a robot contributes no phase progress over a full identity
// period), Motionless (a gathered loop with no displacement anywhere), or
// Decreasing with an exact worst-case bound established by interval
// execution. A fair, motion-bearing cycle without a positive delta-floor
// is a verification failure.
inline CertifyResult certify_cycles(const AbstractGraph& g, const CertifyOptions& opt = {}) {
    QGraph q = build_qgraph(g);
    CertifyResult res;

    // The interval verdict depends only on the prepared step sequence, so
    // results are memoized on a serialized key.
    struct CachedVerdict {
        bool ok = false;
        bool vacuous = false;
        std::string text; // bound template or failure description
    };
    std::unordered_map<std::string, CachedVerdict> cache;
    auto step_key = [](const std::vector<PathStep>& steps, const IState& init) {
        std::string k;
        k.reserve(steps.size() * 4 + 8);
        for (int i = 0; i < 2; ++i) {
            k += static_cast<char>('0' + static_cast<int>(init.r[i].kind));
            k += color_char(init.r[i].pending);
        }
        for (const PathStep& s : steps) {
            k += static_cast<char>('A' + s.robot + 1);
            k += static_cast<char>('0' + static_cast<int>(s.act));
            k += static_cast<char>('0' + static_cast<int>(s.var));
            if (s.act == ActKind::Look || s.act == ActKind::Both) {
                for (int gg = 0; gg < 2; ++gg) {
                    if (s.act == ActKind::Look && gg != s.robot) continue;
                    k += color_char(s.shape[gg].new_color);
                    k += static_cast<char>('0' + static_cast<int>(s.shape[gg].shape));
                    if (s.shape[gg].shape == TargetShape::Frac) k += fmt_rat(s.shape[gg].frac);
                }
            }
        }
        return k;
    };

    auto handle_edge_cycle = [&](const QCyclePath& p) {
        ++res.edge_cycles;
        detail::QFairness f = detail::analyze_qfairness(p);
        if (!f.fair()) {
            ++res.unfair;
            return;
        }
        bool all_gathered = true;
        for (std::uint32_t v : p.nodes) all_gathered &= q.nodes[v].gathered != 0;
        if (!f.motion) {
            if (all_gathered) {
                ++res.motionless;
                return;
            }
            // A fair loop that never moves anything while separated is a
            // livelock; it cannot certify.
            ++res.failed;
            if (res.failures.size() < opt.max_failures)
                res.failures.push_back({CycleCertificate::Kind::Failed, p.nodes,
                                        "fair stagnation cycle (no motion while separated) through " +
                                            qnode_label(q.nodes[p.nodes[0]])});
            return;
        }

        auto prep = detail::prepare_qcycle(q, g.proto, p, f.parity_swap);
        if (!prep) {
            ++res.failed;
            if (res.failures.size() < opt.max_failures)
                res.failures.push_back({CycleCertificate::Kind::Failed, p.nodes,
                                        "fair motion cycle with no pending-free anchor through " +
                                            qnode_label(q.nodes[p.nodes[0]])});
            return;
        }

        std::string key = step_key(prep->first, prep->second);
        auto it = cache.find(key);
        if (it == cache.end()) {
            CachedVerdict v;
            IntervalOutcome outcome = run_interval_path(prep->first, prep->second);
            if (outcome.leaves.empty()) {
                v.ok = true;
                v.vacuous = true;
            } else {
                std::vector<DecreasePiece> pieces;
                for (const ExecLeaf& leaf : outcome.leaves)
                    for (DecreasePiece& dp : decrease_pieces(leaf)) pieces.push_back(dp);
                v.ok = true;
                for (const DecreasePiece& dp : pieces) {
                    if (!piece_has_delta_floor(dp)) {
                        v.ok = false;
                        v.text = "no positive decrease floor on rho " + dp.region.str() + " (bound " +
                                 dp.bound.str() + ")";
                        break;
                    }
                }
                if (v.ok) v.text = match_bound_template(pieces);
            }
            it = cache.emplace(std::move(key), std::move(v)).first;
        }
        const CachedVerdict& v = it->second;
        if (!v.ok) {
            ++res.failed;
            if (res.failures.size() < opt.max_failures)
                res.failures.push_back({CycleCertificate::Kind::Failed, p.nodes,
                                        v.text + " for cycle through " + qnode_label(q.nodes[p.nodes[0]])});
            return;
        }
        if (v.vacuous) {
            ++res.vacuous;
            return;
        }
        ++res.decreasing;
        if (res.samples.size() < 24)
            res.samples.push_back({CycleCertificate::Kind::Decreasing, p.nodes,
                                   "decrease >= " + v.text + " through " + qnode_label(q.nodes[p.nodes[0]])});
    };

    try {
        detail::qcycles(
            q,
            [&](const std::vector<std::uint32_t>& cyc) {
                ++res.node_cycles;
                if (opt.stop_on_first_failure && res.failed > 0) return;
                detail::expand_qedges(q, cyc, handle_edge_cycle, opt.edge_choice_cap);
            },
            opt.max_node_cycles);
    } catch (const std::exception& e) {
        res.abort = e.what();
    }
    return res;
}

} // namespace gather2
