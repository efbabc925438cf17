#pragma once

#include "gather2/executor.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gather2 {

using json = nlohmann::json;

// All numbers in trace files are exact rationals rendered as "num/den"
// strings; points are [x, y] pairs.

inline json rat_json(const Rat& r) { return fmt_rat(r); }
inline Rat rat_from_json(const json& j) {
    auto r = parse_rat(j.get<std::string>());
    if (!r) throw std::runtime_error("bad rational: " + j.dump());
    return *r;
}

inline json point_json(const Point& p) { return json::array({rat_json(p.x), rat_json(p.y)}); }
inline Point point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("bad point: " + j.dump());
    return Point{rat_from_json(j[0]), rat_from_json(j[1])};
}

inline json robot_json(const RobotState& r) {
    json j;
    j["color"] = std::string(1, color_char(r.color));
    j["pos"] = point_json(r.position);
    j["frame"] = json::array({rat_json(r.local_frame.a), rat_json(r.local_frame.b),
                              rat_json(r.local_frame.c), rat_json(r.local_frame.d)});
    if (r.waiting()) {
        j["phase"] = {{"kind", "wait"}};
    } else if (auto* c = std::get_if<PhaseComputing>(&r.phase)) {
        json p{{"kind", "computing"}, {"new_color", std::string(1, color_char(c->outcome.new_color))}};
        p["target"] = c->outcome.target_local ? point_json(*c->outcome.target_local) : json(nullptr);
        j["phase"] = std::move(p);
    } else {
        const auto& m = std::get<PhaseMoving>(r.phase);
        j["phase"] = {{"kind", "moving"}, {"target", point_json(m.target)}, {"origin", point_json(m.move_origin)}};
    }
    return j;
}

inline RobotState robot_from_json(const json& j) {
    RobotState r;
    auto col = parse_color(j.at("color").get<std::string>().at(0));
    if (!col) throw std::runtime_error("bad color");
    r.color = *col;
    r.position = point_from_json(j.at("pos"));
    const auto& f = j.at("frame");
    r.local_frame = Frame({Rat(0), Rat(0)}, rat_from_json(f.at(0)), rat_from_json(f.at(1)),
                          rat_from_json(f.at(2)), rat_from_json(f.at(3)));
    const auto& p = j.at("phase");
    std::string kind = p.at("kind").get<std::string>();
    if (kind == "wait") {
        r.phase = PhaseWait{};
    } else if (kind == "computing") {
        auto nc = parse_color(p.at("new_color").get<std::string>().at(0));
        if (!nc) throw std::runtime_error("bad pending color");
        std::optional<Point> tgt;
        if (!p.at("target").is_null()) tgt = point_from_json(p.at("target"));
        r.phase = PhaseComputing{ComputeOutcome{*nc, std::move(tgt)}};
    } else if (kind == "moving") {
        r.phase = PhaseMoving{point_from_json(p.at("target")), point_from_json(p.at("origin"))};
    } else {
        throw std::runtime_error("bad phase kind: " + kind);
    }
    return r;
}

inline json config_json(const SystemConfig& cfg) {
    return json{{"robots", json::array({robot_json(cfg.robots[0]), robot_json(cfg.robots[1])})},
                {"delta", rat_json(cfg.delta)}};
}

inline SystemConfig config_from_json(const json& j) {
    SystemConfig cfg;
    cfg.robots[0] = robot_from_json(j.at("robots").at(0));
    cfg.robots[1] = robot_from_json(j.at("robots").at(1));
    cfg.delta = rat_from_json(j.at("delta"));
    if (cfg.delta <= 0) throw std::runtime_error("delta must be positive");
    return cfg;
}

inline json action_json(const Action& a) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ActLook>) return {{"kind", "look"}, {"robot", x.robot}};
            if constexpr (std::is_same_v<T, ActFinishCompute>) return {{"kind", "finish"}, {"robot", x.robot}};
            if constexpr (std::is_same_v<T, ActAdvanceMove>)
                return {{"kind", "advance"}, {"robot", x.robot}, {"waypoint", point_json(x.waypoint)}};
            if constexpr (std::is_same_v<T, ActEndMove>)
                return {{"kind", "end"}, {"robot", x.robot}, {"endpoint", point_json(x.endpoint)}};
            return {{"kind", "both_look"}};
        },
        a);
}

inline Action action_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "look") return ActLook{j.at("robot").get<int>()};
    if (kind == "finish") return ActFinishCompute{j.at("robot").get<int>()};
    if (kind == "advance") return ActAdvanceMove{j.at("robot").get<int>(), point_from_json(j.at("waypoint"))};
    if (kind == "end") return ActEndMove{j.at("robot").get<int>(), point_from_json(j.at("endpoint"))};
    if (kind == "both_look") return ActBothLook{};
    throw std::runtime_error("bad action kind: " + kind);
}

enum class Verdict : std::uint8_t { Gathered, Timeout, ScriptEnd, StrategyFault };

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Gathered: return "Gathered";
    case Verdict::Timeout: return "Timeout";
    case Verdict::ScriptEnd: return "ScriptEnd";
    case Verdict::StrategyFault: return "StrategyFault";
    }
    return "?";
}

struct TraceRecord {
    Action action;
    std::uint64_t digest; // of the configuration after the action

    bool operator==(const TraceRecord&) const = default;
};

struct Trace {
    std::string protocol;
    Rat delta;
    int fairness_window = 16;
    std::uint64_t seed = 0;
    std::string strategy;
    SystemConfig initial;
    std::vector<TraceRecord> records;

    bool operator==(const Trace&) const = default;
};

inline std::string digest_hex(std::uint64_t d) {
    static const char* hexd = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = hexd[d & 0xfull];
        d >>= 4;
    }
    return s;
}

inline std::uint64_t digest_from_hex(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

// Line-delimited: one header object, then one record object per action.
inline void write_trace(std::ostream& os, const Trace& t) {
    json hdr{{"type", "header"},       {"protocol", t.protocol}, {"delta", rat_json(t.delta)},
             {"k", t.fairness_window}, {"seed", t.seed},         {"strategy", t.strategy},
             {"initial", config_json(t.initial)}};
    os << hdr.dump() << "\n";
    for (const auto& rec : t.records) {
        json line{{"type", "step"}, {"action", action_json(rec.action)}, {"digest", digest_hex(rec.digest)}};
        os << line.dump() << "\n";
    }
}

inline Trace read_trace(std::istream& is) {
    Trace t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            if (have_header) throw std::runtime_error("duplicate trace header");
            have_header = true;
            t.protocol = j.at("protocol").get<std::string>();
            t.delta = rat_from_json(j.at("delta"));
            t.fairness_window = j.at("k").get<int>();
            t.seed = j.at("seed").get<std::uint64_t>();
            t.strategy = j.value("strategy", "");
            t.initial = config_from_json(j.at("initial"));
        } else if (type == "step") {
            if (!have_header) throw std::runtime_error("trace step before header");
            t.records.push_back({action_from_json(j.at("action")), digest_from_hex(j.at("digest").get<std::string>())});
        } else {
            throw std::runtime_error("bad trace line type: " + type);
        }
    }
    if (!have_header) throw std::runtime_error("trace has no header");
    return t;
}

struct ReplayError {
    std::size_t at_record;
    std::string detail;
};

// Deterministic re-execution; every recorded digest must match.
inline std::variant<SystemConfig, ReplayError> replay(const Trace& t, const Protocol& proto) {
    SystemConfig cfg = t.initial;
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        StepOutcome out = step(cfg, t.records[i].action, proto);
        if (auto* f = std::get_if<StepFault>(&out))
            return ReplayError{i, "illegal action during replay: " + f->detail};
        cfg = std::get<SystemConfig>(std::move(out));
        if (config_digest(cfg) != t.records[i].digest)
            return ReplayError{i, "digest mismatch (trace corruption)"};
    }
    return cfg;
}

} // namespace gather2
