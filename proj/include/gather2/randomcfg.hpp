#pragma once

#include "gather2/executor.hpp"

#include <random>

namespace gather2 {

// Arbitrary initial configurations for self-stabilization experiments: every
// color/phase combination, bounded random rational positions and targets,
// random rational local frames. Any such configuration is a legal start.
struct ConfigSampler {
    std::mt19937_64 rng;

    explicit ConfigSampler(std::uint64_t seed) : rng(seed) {}

    Rat coord(int lo = -100, int hi = 100) {
        std::uniform_int_distribution<int> den(1, 8);
        int q = den(rng);
        std::uniform_int_distribution<long long> num(static_cast<long long>(lo) * q,
                                                     static_cast<long long>(hi) * q);
        return Rat(num(rng), q);
    }

    Point point() { return {coord(), coord()}; }

    Rat delta() {
        // delta in (0, 2], denominators up to 8
        std::uniform_int_distribution<int> num(1, 16);
        return Rat(num(rng), 8);
    }

    Color color() { return std::uniform_int_distribution<int>(0, 1)(rng) ? Color::Black : Color::White; }

    Frame frame(Point origin) {
        for (;;) {
            Rat a = coord(-3, 3), b = coord(-3, 3), c = coord(-3, 3), d = coord(-3, 3);
            if (a * d - b * c != 0) return Frame(std::move(origin), a, b, c, d);
        }
    }

    PhaseState phase(const Point& pos, const Frame& frame_at_pos) {
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return PhaseWait{};
        case 1: {
            std::optional<Point> tgt;
            if (std::uniform_int_distribution<int>(0, 3)(rng) != 0) {
                // Pending targets live in the robot's local frame.
                tgt = frame_at_pos.to_local(point());
            }
            return PhaseComputing{ComputeOutcome{color(), std::move(tgt)}};
        }
        default: {
            Point origin = point(), target = point();
            return PhaseMoving{target, origin};
        }
        }
    }

    SystemConfig config() {
        SystemConfig cfg;
        cfg.delta = delta();
        Point p0 = point();
        Point p1 = std::uniform_int_distribution<int>(0, 7)(rng) == 0 ? p0 : point();
        Point positions[2] = {p0, p1};
        for (int i = 0; i < 2; ++i) {
            RobotState& r = cfg.robots[i];
            r.color = color();
            r.local_frame = frame({Rat(0), Rat(0)});
            r.position = positions[i];
            r.phase = phase(r.position, r.local_frame.with_origin(r.position));
            // A Moving robot sits on the closed segment [origin, target].
            if (auto* m = std::get_if<PhaseMoving>(&r.phase)) {
                std::uniform_int_distribution<int> td(0, 4);
                Rat t(td(rng), 4);
                r.position = interpolate(m->move_origin, m->target, t);
            }
        }
        return cfg;
    }
};

} // namespace gather2
