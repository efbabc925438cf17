#pragma once

#include "gather2/protocol.hpp"

#include <functional>
#include <optional>
#include <sstream>
#include <vector>

namespace gather2 {

// Symbolic worst-case execution on the line through both robots. Every
// quantity is affine in the initial separation x > 0 and the minimum move
// distance d > 0; all case splits are on the ratio rho = d/x, so a region is
// a rho-interval with rational endpoints. Everything is exact.

struct Aff {
    Rat cx{0}, cd{0}; // cx*x + cd*d

    bool operator==(const Aff&) const = default;
    Aff operator+(const Aff& o) const { return {cx + o.cx, cd + o.cd}; }
    Aff operator-(const Aff& o) const { return {cx - o.cx, cd - o.cd}; }
    Aff scaled(const Rat& t) const { return {cx * t, cd * t}; }

    static Aff zero() { return {}; }
    static Aff sep_x() { return {Rat(1), Rat(0)}; }
    static Aff delta() { return {Rat(0), Rat(1)}; }

    Rat eval(const Rat& x, const Rat& d) const { return cx * x + cd * d; }

    std::string str() const {
        std::ostringstream os;
        os << fmt_rat(cx) << "*x + " << fmt_rat(cd) << "*delta";
        return os.str();
    }
};

// Closed rho-interval; nullopt endpoints mean the open limits 0+ / +inf.
struct Rho {
    std::optional<Rat> lo, hi;

    static Rho all() { return {}; }

    bool contains(const Rat& r) const {
        if (r <= 0) return false;
        if (lo && r < *lo) return false;
        if (hi && r > *hi) return false;
        return true;
    }

    std::string str() const {
        std::string a = lo ? fmt_rat(*lo) : "0";
        std::string b = hi ? fmt_rat(*hi) : "inf";
        return "[" + a + ", " + b + "]";
    }
};

enum class Sgn { Neg, Zero, Pos, Mixed };

namespace ivd {

inline int sign_rat(const Rat& r) { return r > 0 ? 1 : r < 0 ? -1 : 0; }

// sign of f over rho -> f(rho) = cx + cd*rho (x > 0 factored out)
inline int sign_at_lo(const Aff& f, const Rho& r) {
    if (r.lo) return sign_rat(f.cx + f.cd * *r.lo);
    if (f.cx != 0) return sign_rat(f.cx); // limit rho -> 0+
    return sign_rat(f.cd);
}

inline int sign_at_hi(const Aff& f, const Rho& r) {
    if (r.hi) return sign_rat(f.cx + f.cd * *r.hi);
    if (f.cd != 0) return sign_rat(f.cd); // limit rho -> inf
    return sign_rat(f.cx);
}

} // namespace ivd

// Sign of an affine form over a region; boundary zeros adopt the interior
// sign (the two resolutions agree at the crossing point).
inline Sgn sign_on(const Aff& f, const Rho& r, Rat* root = nullptr) {
    int slo = ivd::sign_at_lo(f, r), shi = ivd::sign_at_hi(f, r);
    if (slo == 0 && shi == 0) return Sgn::Zero;
    if (slo == 0) return shi > 0 ? Sgn::Pos : Sgn::Neg;
    if (shi == 0) return slo > 0 ? Sgn::Pos : Sgn::Neg;
    if (slo == shi) return slo > 0 ? Sgn::Pos : Sgn::Neg;
    if (root && f.cd != 0) *root = -f.cx / f.cd;
    return Sgn::Mixed;
}

struct AffIval {
    Aff lo, hi; // invariant on the region: lo <= hi

    bool operator==(const AffIval&) const = default;
    static AffIval point(Aff a) { return {a, a}; }
    bool is_point() const { return lo == hi; }

    AffIval operator+(const AffIval& o) const { return {lo + o.lo, hi + o.hi}; }
    AffIval operator-(const AffIval& o) const { return {lo - o.hi, hi - o.lo}; }
    AffIval scaled_nonneg(const Rat& t) const { return {lo.scaled(t), hi.scaled(t)}; }
};

// A branch of the symbolic execution: a rho-region plus anything the caller
// threads through. Primitives split regions at affine roots.
template <typename T> struct Branched {
    Rho region;
    T value;
};

namespace ivd {

// Split a region by the sign of f; cont(subregion, sign in {-1,0,+1}).
inline void split_sign(const Rho& r, const Aff& f, const std::function<void(const Rho&, int)>& cont) {
    Rat root;
    Sgn s = sign_on(f, r, &root);
    switch (s) {
    case Sgn::Zero: cont(r, 0); return;
    case Sgn::Pos: cont(r, 1); return;
    case Sgn::Neg: cont(r, -1); return;
    case Sgn::Mixed: break;
    }
    Rho left = r, right = r;
    left.hi = root;
    right.lo = root;
    int slo = sign_at_lo(f, r);
    cont(left, slo);
    cont(right, -slo);
}

inline void aff_min(const Rho& r, const Aff& a, const Aff& b,
                    const std::function<void(const Rho&, const Aff&)>& cont) {
    split_sign(r, a - b, [&](const Rho& rr, int s) { cont(rr, s <= 0 ? a : b); });
}

inline void aff_max(const Rho& r, const Aff& a, const Aff& b,
                    const std::function<void(const Rho&, const Aff&)>& cont) {
    split_sign(r, a - b, [&](const Rho& rr, int s) { cont(rr, s >= 0 ? a : b); });
}

inline void ival_hull(const Rho& r, const AffIval& a, const AffIval& b,
                      const std::function<void(const Rho&, const AffIval&)>& cont) {
    aff_min(r, a.lo, b.lo, [&](const Rho& r1, const Aff& lo) {
        aff_max(r1, a.hi, b.hi, [&](const Rho& r2, const Aff& hi) { cont(r2, AffIval{lo, hi}); });
    });
}

// Intersection; cont is called only on subregions where it is nonempty.
inline void ival_intersect(const Rho& r, const AffIval& a, const AffIval& b,
                           const std::function<void(const Rho&, const AffIval&)>& cont) {
    aff_max(r, a.lo, b.lo, [&](const Rho& r1, const Aff& lo) {
        aff_min(r1, a.hi, b.hi, [&](const Rho& r2, const Aff& hi) {
            split_sign(r2, hi - lo, [&](const Rho& r3, int s) {
                if (s >= 0) cont(r3, AffIval{lo, hi});
            });
        });
    });
}

} // namespace ivd

} // namespace gather2
