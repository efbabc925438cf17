#pragma once

#include "gather2/trace.hpp"

#include <functional>
#include <memory>

namespace gather2 {

// Fairness bookkeeping surfaced to strategies so they can honor their debt.
struct FairnessView {
    int window = 16;              // K
    std::array<int, 2> gap{0, 0}; // consecutive actions not involving the robot
    std::array<int, 2> phase_turns{0, 0}; // own actions inside the current Computing/Moving phase

    // True when the very next action must involve robot r.
    bool must_act(int r) const { return gap[r] >= window - 1; }
    // True when robot r's next own action must end its MOVE phase.
    bool must_end_move(int r) const { return phase_turns[r] >= window - 1; }
};

// A scheduler strategy: produces the next action, including exact endpoints
// for EndMove. Returning nullopt ends the run (ScriptEnd), unless fault() is
// set, which aborts the run with a diagnostic.
class Strategy {
  public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    virtual std::optional<Action> next(const SystemConfig& cfg, const FairnessView& fair) = 0;
    virtual std::optional<std::string> fault() const { return std::nullopt; }
};

struct RunResult {
    Verdict verdict = Verdict::Timeout;
    std::uint64_t steps = 0;
    SystemConfig final;
    Trace trace; // records filled only when requested
    std::string diagnostic;
};

struct RunOptions {
    int fairness_window = 16;
    std::uint64_t max_steps = 1'000'000;
    bool record_trace = true;
    // Called after every applied action with (pre, action, post).
    std::function<void(const SystemConfig&, const Action&, const SystemConfig&)> observer;
};

// Drives a strategy against the step semantics. Enforces legality and both
// fairness contracts: every window of K consecutive actions involves each
// robot, and no robot spends more than K of its own turns inside a single
// Computing or Moving phase.
inline RunResult run(const SystemConfig& initial, const Protocol& proto, Strategy& strat,
                     const RunOptions& opt = {}) {
    RunResult res;
    res.final = initial;
    res.trace.protocol = proto.name;
    res.trace.delta = initial.delta;
    res.trace.fairness_window = opt.fairness_window;
    res.trace.strategy = strat.name();
    res.trace.initial = initial;

    FairnessView fair;
    fair.window = opt.fairness_window;

    auto phase_index = [](const RobotState& r) { return static_cast<int>(r.phase.index()); };

    while (true) {
        if (is_gathered_quiescent(res.final)) {
            res.verdict = Verdict::Gathered;
            return res;
        }
        if (res.steps >= opt.max_steps) {
            res.verdict = Verdict::Timeout;
            return res;
        }
        std::optional<Action> act = strat.next(res.final, fair);
        if (!act) {
            if (auto f = strat.fault()) {
                res.verdict = Verdict::StrategyFault;
                res.diagnostic = *f;
            } else {
                res.verdict = Verdict::ScriptEnd;
            }
            return res;
        }
        StepOutcome out = step(res.final, *act, proto);
        if (auto* f = std::get_if<StepFault>(&out)) {
            res.verdict = Verdict::StrategyFault;
            res.diagnostic = "strategy proposed an illegal action: " + f->detail;
            return res;
        }
        SystemConfig post = std::get<SystemConfig>(std::move(out));

        // Window fairness.
        for (int r = 0; r < 2; ++r) {
            if (involves_robot(*act, r))
                fair.gap[r] = 0;
            else if (++fair.gap[r] >= fair.window) {
                res.verdict = Verdict::StrategyFault;
                res.diagnostic = "fairness violation: robot " + std::to_string(r) + " starved for " +
                                 std::to_string(fair.gap[r]) + " actions";
                return res;
            }
        }
        // Finite phase durations.
        for (int r = 0; r < 2; ++r) {
            bool same_phase = phase_index(res.final.robots[r]) == phase_index(post.robots[r]) &&
                              !post.robots[r].waiting();
            if (involves_robot(*act, r)) {
                if (same_phase) {
                    if (++fair.phase_turns[r] >= fair.window) {
                        res.verdict = Verdict::StrategyFault;
                        res.diagnostic = "fairness violation: robot " + std::to_string(r) +
                                         " held one phase for " + std::to_string(fair.phase_turns[r]) +
                                         " of its turns";
                        return res;
                    }
                } else {
                    fair.phase_turns[r] = 0;
                }
            } else if (!same_phase) {
                fair.phase_turns[r] = 0;
            }
        }

        if (opt.observer) opt.observer(res.final, *act, post);
        if (opt.record_trace) res.trace.records.push_back({*act, config_digest(post)});
        res.final = std::move(post);
        ++res.steps;
    }
}

// Clean nominal start: both White, Wait, identity frames, on the x-axis at
// distance `dist`.
inline SystemConfig clean_start(const Rat& dist, const Rat& delta) {
    SystemConfig cfg;
    cfg.robots[0].position = {Rat(0), Rat(0)};
    cfg.robots[1].position = {dist, Rat(0)};
    cfg.delta = delta;
    return cfg;
}

} // namespace gather2
