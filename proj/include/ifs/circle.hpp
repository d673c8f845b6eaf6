#pragma once

#include <cmath>
#include <vector>

namespace ifs {

// Positions on R/Z are plain doubles kept in [0,1).
inline double wrap(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

inline double circ_dist(double x, double y) {
    double d = std::fabs(x - y);
    d = d - std::floor(d);
    return d < 1.0 - d ? d : 1.0 - d;
}

// Forward displacement from a to b, in [0,1).
inline double ccw(double a, double b) { return wrap(b - a); }

struct Arc {
    double start = 0.0;
    double length = 1.0;

    Arc() = default;
    Arc(double s, double len);
    static Arc between(double a, double b) { return Arc(a, ccw(a, b)); }
    static Arc ball(double center, double radius) { return Arc(center - radius, 2.0 * radius); }

    bool full() const { return length >= 1.0; }
    bool contains(double x) const { return full() || ccw(start, x) < length; }
    // Open-arc membership with both endpoints excluded.
    bool contains_open(double x) const;
    bool contains_arc(const Arc& other) const;
    double end() const { return wrap(start + length); }
    double mid() const { return wrap(start + 0.5 * length); }
    double at(double t) const { return wrap(start + t * length); }
    // Distance from x to the complement, zero outside.
    double depth(double x) const;
};

class ArcUnion {
public:
    ArcUnion() = default;
    explicit ArcUnion(std::vector<Arc> arcs);

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }
    bool full() const { return arcs_.size() == 1 && arcs_[0].full(); }
    bool contains(double x) const;
    double total_length() const;

private:
    std::vector<Arc> arcs_;
};

}  // namespace ifs
