#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ifs/circle.hpp"
#include "ifs/real.hpp"

namespace ifs {

inline constexpr double kTolInv = 1e-12;
inline constexpr double kTolDeriv = 1e-9;
inline constexpr int kMaxBisect = 200;

// One piece of a lift on [x0, x1]. Poly coefficients are ascending powers of
// the absolute lift coordinate; Hermite is the quintic with zero second
// derivatives at both ends.
struct Piece {
    enum class Kind { Poly, Hermite };
    Kind kind = Kind::Poly;
    std::vector<Real> coeffs;
    Real y0, y1, s0, s1;

    static Piece poly(std::vector<Real> c) {
        Piece p;
        p.kind = Kind::Poly;
        p.coeffs = std::move(c);
        return p;
    }
    static Piece hermite(Real y0, Real y1, Real s0, Real s1) {
        Piece p;
        p.kind = Kind::Hermite;
        p.y0 = y0;
        p.y1 = y1;
        p.s0 = s0;
        p.s1 = s1;
        return p;
    }
};

struct Knot {
    Real x, y, s;
};

struct DerivInfo {
    double value = 1.0;
    bool at_break = false;
    bool nondifferentiable = false;
};

namespace detail {
struct Node;
}

class CircleMap {
public:
    enum class Kind { Rotation, Piecewise, Compose, Inverse, IdentityOutsideArc };

    CircleMap();  // identity
    static CircleMap identity() { return CircleMap(); }
    static CircleMap rotation(Real angle);
    static CircleMap piecewise(std::vector<Real> breaks, std::vector<Piece> pieces, int degree = 1);
    static CircleMap hermite(const std::vector<Knot>& knots, int degree = 1);
    // maps.back() is applied first.
    static CircleMap compose(std::vector<CircleMap> maps);
    static CircleMap inverse(CircleMap m);
    static CircleMap identity_outside_arc(CircleMap inner, Real start, Real length);

    Kind kind() const;
    int degree() const;
    bool is_identity() const;
    bool invertible() const { return degree() == 1; }

    double lift(double x) const;
    double dlift(double x) const;
    DerivInfo derivative_info(double x) const;
    double operator()(double x) const { return wrap(lift(x)); }

    // Rotation angle, when kind() == Rotation.
    double angle() const;
    std::vector<double> breakpoints() const;

    nlohmann::json to_json() const;
    static CircleMap from_json(const nlohmann::json& j);

    const detail::Node& node() const { return *node_; }

private:
    explicit CircleMap(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::Node> node_;
};

double eval(const CircleMap& m, double x);
double derivative(const CircleMap& m, double x);
DerivInfo derivative_info(const CircleMap& m, double x);
std::vector<double> inverse_branches(const CircleMap& m, double y);

// Quintic Hermite helpers.
double hermite_value(double t, double h, double y0, double y1, double s0, double s1);
double hermite_slope(double t, double h, double y0, double y1, double s0, double s1);
bool hermite_monotone(double h, double y0, double y1, double s0, double s1, int grid = 1000);

// Monotone chain of Hermite knots from (x0,y0,s0) to (x1,y1,s1). A single
// quintic is used when it is monotone; otherwise knots are sampled from a
// smooth increasing profile with the same end data.
std::vector<Knot> hermite_bridge(Real x0, Real y0, Real s0, Real x1, Real y1, Real s1);

// Affine pieces in lift coordinates, listed in increasing order over one turn
// starting at pieces[0].x0. Gaps between them (and the wrap gap) are filled
// by Hermite bridges. The lift gains `degree` over one turn.
struct AffineSpan {
    Real x0, x1, y0, y1;
};
CircleMap affine_skeleton(const std::vector<AffineSpan>& spans, int degree = 1);

// North-south diffeomorphism with the given attracting and repelling fixed
// points; multipliers are `contraction` and 1/contraction.
CircleMap build_north_south(double attractor, double repeller, double contraction);

CircleMap build_fig1_cover();
std::pair<CircleMap, CircleMap> build_fig2_pair_normalized();
std::pair<CircleMap, CircleMap> build_fig2_pair();
CircleMap build_h();
// Middle gap (5/18, 11/36) of the Cantor set in [1/4,1/3]; support of the
// blending pair.
Arc fig2_gap();
// Contracting inverse branches of the slope-3 pieces of the degree-2 cover.
std::pair<CircleMap, CircleMap> fig1_inverse_branches();

}  // namespace ifs
