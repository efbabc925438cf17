#pragma once

#include "gather2/engine.hpp"

#include <random>

namespace gather2 {

// Endpoint that satisfies the min-progress rule with as little displacement
// as the rule allows. Exact when the segment length is rational (all the
// collinear cases); otherwise the nearest 64th of the remaining segment that
// still satisfies the rule.
inline Point min_progress_endpoint(const RobotState& r, const Rat& delta) {
    const auto& m = std::get<PhaseMoving>(r.phase);
    Rat full = dist_sq(m.move_origin, m.target);
    Rat d2 = delta * delta;
    if (full <= d2) return m.target;
    Rat covered = dist_sq(m.move_origin, r.position);
    if (covered >= d2) return r.position;
    if (auto d = rational_sqrt(full)) {
        Rat s = delta / *d;
        Point e = interpolate(m.move_origin, m.target, s);
        if (on_segment(e, r.position, m.target)) return e;
    }
    for (int k = 1; k < 64; ++k) {
        Point e = interpolate(r.position, m.target, Rat(k, 64));
        if (dist_sq(m.move_origin, e) >= d2) return e;
    }
    return m.target;
}

// Lock-step rounds: simultaneous LOOKs, both COMPUTEs, both MOVE endings.
// end_full=false stops every move at exactly the minimum the rule allows.
class FsyncStrategy final : public Strategy {
  public:
    explicit FsyncStrategy(bool end_full = true) : end_full_(end_full) {}

    std::string name() const override { return end_full_ ? "fsync" : "fsync-min"; }

    std::optional<Action> next(const SystemConfig& cfg, const FairnessView&) override {
        for (int r = 0; r < 2; ++r)
            if (cfg.robots[r].computing()) return ActFinishCompute{r};
        for (int r = 0; r < 2; ++r)
            if (cfg.robots[r].moving()) {
                Point e = end_full_ ? std::get<PhaseMoving>(cfg.robots[r].phase).target
                                    : min_progress_endpoint(cfg.robots[r], cfg.delta);
                return ActEndMove{r, e};
            }
        return ActBothLook{};
    }

  private:
    bool end_full_;
};

// Alternating atomic LCM cycles, one robot at a time.
class SsyncAltStrategy final : public Strategy {
  public:
    std::string name() const override { return "ssync-alt"; }

    std::optional<Action> next(const SystemConfig& cfg, const FairnessView&) override {
        const RobotState& r = cfg.robots[turn_];
        if (r.computing()) return ActFinishCompute{turn_};
        if (r.moving()) {
            Point t = std::get<PhaseMoving>(r.phase).target;
            int acted = turn_;
            turn_ = 1 - turn_;
            looked_ = false;
            return ActEndMove{acted, t};
        }
        if (!looked_) {
            looked_ = true;
            return ActLook{turn_};
        }
        // Wait again after Look+Finish with no move: cycle complete.
        looked_ = true;
        int acted = turn_;
        turn_ = 1 - turn_;
        looked_ = false;
        return ActLook{acted};
    }

  private:
    int turn_ = 0;
    bool looked_ = false;
};

// Round-robin micro-steps; every completed move stops at exactly the minimum
// displacement the rule allows.
class MinProgressStrategy final : public Strategy {
  public:
    std::string name() const override { return "minprog"; }

    std::optional<Action> next(const SystemConfig& cfg, const FairnessView&) override {
        for (int attempt = 0; attempt < 2; ++attempt) {
            int r = turn_;
            turn_ = 1 - turn_;
            const RobotState& rs = cfg.robots[r];
            if (rs.waiting()) return ActLook{r};
            if (rs.computing()) return ActFinishCompute{r};
            return ActEndMove{r, min_progress_endpoint(rs, cfg.delta)};
        }
        return std::nullopt;
    }

  private:
    int turn_ = 0;
};

// The scripted 4-step execution that halves the distance of the unguarded
// two-color rule from a both-Black start, iterated k times. Moves are rigid
// (full). Slots that are illegal for the current phase are skipped, so the
// same script can be replayed against protocols that diverge from it.
class CounterexampleStrategy final : public Strategy {
  public:
    explicit CounterexampleStrategy(int iterations) : iterations_(iterations) {}

    std::string name() const override { return "counterexample:" + std::to_string(iterations_); }

    std::optional<Action> next(const SystemConfig& cfg, const FairnessView&) override {
        if (!checked_) {
            checked_ = true;
            bool premise = cfg.robots[0].color == Color::Black && cfg.robots[1].color == Color::Black &&
                           cfg.robots[0].waiting() && cfg.robots[1].waiting() && !cfg.positions_equal();
            if (!premise) {
                fault_ = "counterexample script requires both robots Black, Wait, at distinct positions";
                return std::nullopt;
            }
        }
        while (iter_ < iterations_) {
            if (slot_ >= kSlots) {
                slot_ = 0;
                ++iter_;
                continue;
            }
            Slot s = kScript[slot_++];
            if (legal(cfg, s)) return realize(cfg, s);
        }
        return std::nullopt;
    }

    std::optional<std::string> fault() const override { return fault_; }

  private:
    enum class Op : std::uint8_t { Both, Look, Finish, EndFull };
    struct Slot {
        Op op;
        int robot;
    };
    static constexpr int kSlots = 12;
    static constexpr Slot kScript[kSlots] = {
        {Op::Both, -1},    // both LOOK
        {Op::Finish, 0},   // A completes its cycle (no move)
        {Op::Look, 0},     // A looks again
        {Op::Finish, 0},   // A starts moving to B
        {Op::Finish, 1},   // B completes its cycle
        {Op::Look, 1},     // B looks: midpoint target, before A has moved
        {Op::EndFull, 0},  // A reaches B
        {Op::Look, 0},     // A begins a whole new cycle
        {Op::Finish, 0},   //
        {Op::EndFull, 0},  //
        {Op::Finish, 1},   // B turns Black and starts moving to the old midpoint
        {Op::EndFull, 1},  //
    };

    static bool legal(const SystemConfig& cfg, Slot s) {
        switch (s.op) {
        case Op::Both: return cfg.robots[0].waiting() && cfg.robots[1].waiting();
        case Op::Look: return cfg.robots[s.robot].waiting();
        case Op::Finish: return cfg.robots[s.robot].computing();
        case Op::EndFull: return cfg.robots[s.robot].moving();
        }
        return false;
    }

    static Action realize(const SystemConfig& cfg, Slot s) {
        switch (s.op) {
        case Op::Both: return ActBothLook{};
        case Op::Look: return ActLook{s.robot};
        case Op::Finish: return ActFinishCompute{s.robot};
        case Op::EndFull: return ActEndMove{s.robot, std::get<PhaseMoving>(cfg.robots[s.robot].phase).target};
        }
        return ActBothLook{};
    }

    int iterations_;
    int iter_ = 0;
    int slot_ = 0;
    bool checked_ = false;
    std::optional<std::string> fault_;
};

struct RandomBias {
    int look = 4;
    int finish = 4;
    int advance = 2;
    int end = 5;
    int both = 1;
};

// Seeded fair random scheduler. Endpoints are random rational fractions of
// the remaining segment, filtered by the exact min-progress predicate.
class RandomStrategy final : public Strategy {
  public:
    explicit RandomStrategy(std::uint64_t seed, RandomBias bias = {}) : rng_(seed), bias_(bias), seed_(seed) {}

    std::string name() const override { return "random:" + std::to_string(seed_); }

    std::optional<Action> next(const SystemConfig& cfg, const FairnessView& fair) override {
        struct Cand {
            Action act;
            int weight;
        };
        std::vector<Cand> cands;
        cands.reserve(16);

        auto add_robot_actions = [&](int r) {
            const RobotState& rs = cfg.robots[r];
            if (rs.waiting()) {
                cands.push_back({ActLook{r}, bias_.look});
                return;
            }
            if (rs.computing()) {
                cands.push_back({ActFinishCompute{r}, bias_.finish});
                return;
            }
            const auto& m = std::get<PhaseMoving>(rs.phase);
            bool must_end = fair.must_end_move(r);
            if (!must_end && rs.position != m.target) {
                Rat s = frac();
                cands.push_back({ActAdvanceMove{r, interpolate(rs.position, m.target, s)}, bias_.advance});
            }
            Point e = pick_endpoint(rs, cfg.delta);
            cands.push_back({ActEndMove{r, e}, must_end ? 1000 : bias_.end});
        };

        // At most one robot can be starving; it then gets exclusive service.
        int forced = fair.must_act(0) ? 0 : fair.must_act(1) ? 1 : -1;
        if (forced >= 0) {
            add_robot_actions(forced);
        } else {
            add_robot_actions(0);
            add_robot_actions(1);
            if (cfg.robots[0].waiting() && cfg.robots[1].waiting())
                cands.push_back({ActBothLook{}, bias_.both});
        }
        if (cands.empty()) return std::nullopt;

        int total = 0;
        for (const auto& c : cands) total += c.weight;
        std::uniform_int_distribution<int> dist(0, total - 1);
        int pick = dist(rng_);
        for (const auto& c : cands) {
            pick -= c.weight;
            if (pick < 0) return c.act;
        }
        return cands.back().act;
    }

  private:
    Rat frac() {
        std::uniform_int_distribution<int> dist(1, 8);
        return Rat(dist(rng_), 8);
    }

    Point pick_endpoint(const RobotState& rs, const Rat& delta) {
        const auto& m = std::get<PhaseMoving>(rs.phase);
        Rat full = dist_sq(m.move_origin, m.target);
        Rat d2 = delta * delta;
        std::array<Rat, 9> fracs{Rat(1), Rat(7, 8), Rat(3, 4), Rat(5, 8), Rat(1, 2),
                                 Rat(3, 8), Rat(1, 4), Rat(1, 8), Rat(0)};
        std::vector<Point> legal;
        for (const Rat& s : fracs) {
            Point e = interpolate(rs.position, m.target, s);
            Rat covered = dist_sq(m.move_origin, e);
            if (covered >= full || covered >= d2 || e == m.target) legal.push_back(e);
        }
        if (legal.empty()) return m.target;
        std::uniform_int_distribution<std::size_t> dist(0, legal.size() - 1);
        return legal[dist(rng_)];
    }

    std::mt19937_64 rng_;
    RandomBias bias_;
    std::uint64_t seed_;
};

// Fixed action list, e.g. loaded from a file.
class ScriptStrategy final : public Strategy {
  public:
    explicit ScriptStrategy(std::vector<Action> actions, std::string label = "script")
        : actions_(std::move(actions)), label_(std::move(label)) {}

    std::string name() const override { return label_; }

    std::optional<Action> next(const SystemConfig&, const FairnessView&) override {
        if (at_ >= actions_.size()) return std::nullopt;
        return actions_[at_++];
    }

  private:
    std::vector<Action> actions_;
    std::string label_;
    std::size_t at_ = 0;
};

// Selector syntax: fsync | fsync-min | ssync-alt | minprog | random:<seed> |
// counterexample:<k> | script:<file>
inline std::unique_ptr<Strategy> parse_strategy(const std::string& sel) {
    if (sel == "fsync") return std::make_unique<FsyncStrategy>(true);
    if (sel == "fsync-min") return std::make_unique<FsyncStrategy>(false);
    if (sel == "ssync-alt") return std::make_unique<SsyncAltStrategy>();
    if (sel == "minprog") return std::make_unique<MinProgressStrategy>();
    auto num_after = [&](const std::string& prefix) -> std::optional<std::string> {
        if (sel.rfind(prefix, 0) != 0) return std::nullopt;
        return sel.substr(prefix.size());
    };
    if (auto s = num_after("random:")) {
        try {
            return std::make_unique<RandomStrategy>(std::stoull(*s));
        } catch (...) {
            return nullptr;
        }
    }
    if (auto s = num_after("counterexample:")) {
        try {
            int k = std::stoi(*s);
            if (k < 1) return nullptr;
            return std::make_unique<CounterexampleStrategy>(k);
        } catch (...) {
            return nullptr;
        }
    }
    if (auto s = num_after("script:")) {
        std::ifstream in(*s);
        if (!in) return nullptr;
        std::vector<Action> acts;
        std::string line;
        try {
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                json j = json::parse(line);
                acts.push_back(action_from_json(j.is_object() && j.contains("action") ? j.at("action") : j));
            }
        } catch (...) {
            return nullptr;
        }
        return std::make_unique<ScriptStrategy>(std::move(acts), sel);
    }
    return nullptr;
}

} // namespace gather2
