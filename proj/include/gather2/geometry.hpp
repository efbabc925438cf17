#pragma once

#include "gather2/rational.hpp"

#include <stdexcept>
#include <string>

namespace gather2 {

struct Point {
    Rat x, y;

    bool operator==(const Point&) const = default;

    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point scaled(const Rat& t) const { return {x * t, y * t}; }
};

inline std::string fmt_point(const Point& p) {
    return "[" + fmt_rat(p.x) + "," + fmt_rat(p.y) + "]";
}

inline Point midpoint(const Point& a, const Point& b) {
    return {(a.x + b.x) / 2, (a.y + b.y) / 2};
}

// from + t * (to - from); t must lie in [0, 1].
inline Point interpolate(const Point& from, const Point& to, const Rat& t) {
    if (t < 0 || t > 1)
        throw std::domain_error("interpolate: t outside [0,1]: " + fmt_rat(t));
    return from + (to - from).scaled(t);
}

inline Rat dist_sq(const Point& a, const Point& b) {
    Rat dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline Rat cross(const Point& u, const Point& v) { return u.x * v.y - u.y * v.x; }
inline Rat dot(const Point& u, const Point& v) { return u.x * v.x + u.y * v.y; }

// p on the closed segment [a, b], decided exactly.
inline bool on_segment(const Point& p, const Point& a, const Point& b) {
    Point ab = b - a, ap = p - a;
    if (cross(ab, ap) != 0) return false;
    Rat t = dot(ap, ab);
    return t >= 0 && t <= dot(ab, ab);
}

// Movement by fraction t along a segment of squared length seg_sq satisfies
// "displacement >= min(delta, full length)", decided via t^2*seg_sq vs delta^2.
inline bool meets_min_progress(const Rat& t, const Rat& seg_sq, const Rat& delta) {
    if (t >= 1) return true;
    return t * t * seg_sq >= delta * delta;
}

// Local coordinate system: invertible affine map. No chirality or scale
// assumptions; determinant may be negative.
struct Frame {
    Point origin;
    Rat a, b, c, d; // basis columns (a,c) and (b,d)

    Frame(Point org, Rat a_, Rat b_, Rat c_, Rat d_)
        : origin(std::move(org)), a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
        if (det() == 0) throw std::invalid_argument("Frame: singular basis");
    }

    static Frame identity(Point org = {Rat(0), Rat(0)}) {
        return Frame(std::move(org), Rat(1), Rat(0), Rat(0), Rat(1));
    }

    Rat det() const { return a * d - b * c; }

    bool operator==(const Frame&) const = default;

    // global -> local: B^-1 (p - origin)
    Point to_local(const Point& p) const {
        Rat dx = p.x - origin.x, dy = p.y - origin.y;
        Rat dt = det();
        return {(d * dx - b * dy) / dt, (a * dy - c * dx) / dt};
    }

    // local -> global: B q + origin
    Point from_local(const Point& q) const {
        return {a * q.x + b * q.y + origin.x, c * q.x + d * q.y + origin.y};
    }

    Frame with_origin(Point org) const { return Frame(std::move(org), a, b, c, d); }
};

} // namespace gather2
