#include "ifs/circle.hpp"

#include <algorithm>
#include <stdexcept>

namespace ifs {

Arc::Arc(double s, double len) : start(wrap(s)), length(len) {
    if (!(len > 0.0)) throw std::invalid_argument("arc length must be positive");
    if (length >= 1.0) {
        length = 1.0;
        start = 0.0;
    }
}

bool Arc::contains_open(double x) const {
    if (full()) return true;
    double u = ccw(start, x);
    return u > 0.0 && u < length;
}

bool Arc::contains_arc(const Arc& o) const {
    if (full()) return true;
    if (o.full()) return false;
    double u = ccw(start, o.start);
    return u + o.length <= length;
}

double Arc::depth(double x) const {
    if (full()) return 0.5;
    double u = ccw(start, x);
    if (u >= length) return 0.0;
    return std::min(u, length - u);
}

ArcUnion::ArcUnion(std::vector<Arc> arcs) {
    if (arcs.empty()) return;
    for (const Arc& a : arcs) {
        if (a.full()) {
            arcs_ = {Arc(0.0, 1.0)};
            return;
        }
    }
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
    // Unroll onto [s0, s0+2) so wrapping arcs merge with the first ones.
    struct Span {
        double a, b;
    };
    std::vector<Span> spans;
    for (const Arc& a : arcs) spans.push_back({a.start, a.start + a.length});
    std::vector<Span> merged;
    for (const Span& s : spans) {
        if (!merged.empty() && s.a <= merged.back().b) {
            merged.back().b = std::max(merged.back().b, s.b);
        } else {
            merged.push_back(s);
        }
    }
    // The last span may reach past 1 and swallow leading spans.
    while (merged.size() > 1 && merged.back().b >= merged.front().a + 1.0) {
        merged.back().b = std::max(merged.back().b, merged.front().b + 1.0);
        merged.erase(merged.begin());
    }
    for (const Span& s : merged) {
        if (s.b - s.a >= 1.0) {
            arcs_ = {Arc(0.0, 1.0)};
            return;
        }
    }
    if (merged.size() == 1 && merged[0].b - merged[0].a >= 1.0) {
        arcs_ = {Arc(0.0, 1.0)};
        return;
    }
    for (const Span& s : merged) arcs_.emplace_back(s.a, s.b - s.a);
    std::sort(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
}

bool ArcUnion::contains(double x) const {
    for (const Arc& a : arcs_)
        if (a.contains(x)) return true;
    return false;
}

double ArcUnion::total_length() const {
    double s = 0.0;
    for (const Arc& a : arcs_) s += a.length;
    return std::min(s, 1.0);
}

}  // namespace ifs
