#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gather2 {

// Exact arbitrary-precision rational. Canonical form (reduced, positive
// denominator) is maintained by the backend on every operation.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rat rat(long long n, long long d = 1) { return Rat(BigInt(n), BigInt(d)); }

// Serialized form is always "num/den", even for integers ("3/1").
inline std::string fmt_rat(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

inline std::optional<Rat> parse_rat(std::string_view s) {
    if (s.empty()) return std::nullopt;
    auto bad = [](std::string_view v) {
        if (v.empty()) return true;
        std::size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
        if (i == v.size()) return true;
        for (; i < v.size(); ++i)
            if (v[i] < '0' || v[i] > '9') return true;
        return false;
    };
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) {
            if (bad(s)) return std::nullopt;
            return Rat(BigInt(std::string(s)));
        }
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (bad(num) || bad(den)) return std::nullopt;
        BigInt d{std::string(den)};
        if (d == 0) return std::nullopt;
        return Rat(BigInt(std::string(num)), d);
    } catch (...) {
        return std::nullopt;
    }
}

// Exact rational square root, when one exists.
inline std::optional<Rat> rational_sqrt(const Rat& r) {
    if (r < 0) return std::nullopt;
    BigInt n = numerator(r), d = denominator(r);
    BigInt sn = sqrt(n), sd = sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    return Rat(sn, sd);
}

inline const Rat& rat_min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a >= b ? a : b; }

// FNV-1a, used for trace digests. Stable across platforms and runs.
struct Fnv1a {
    std::uint64_t h = 1469598103934665603ULL;
    void feed(std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    }
    void feed_sep() { feed("\x1f"); }
};

} // namespace gather2
