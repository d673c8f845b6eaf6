#include "ifs/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ifs/errors.hpp"

namespace ifs {

using nlohmann::json;

double hermite_value(double t, double h, double y0, double y1, double s0, double s1) {
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double h1 = 10 * t3 - 15 * t4 + 6 * t5;
    double g0 = t - 6 * t3 + 8 * t4 - 3 * t5;
    double g1 = -4 * t3 + 7 * t4 - 3 * t5;
    return y0 + (y1 - y0) * h1 + h * (s0 * g0 + s1 * g1);
}

double hermite_slope(double t, double h, double y0, double y1, double s0, double s1) {
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    double u = t * (1 - t);
    double dh1 = 30 * u * u;
    double dg0 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    double dg1 = -12 * t2 + 28 * t3 - 15 * t4;
    return (y1 - y0) / h * dh1 + s0 * dg0 + s1 * dg1;
}

bool hermite_monotone(double h, double y0, double y1, double s0, double s1, int grid) {
    if (!(h > 0) || !(y1 > y0) || !(s0 > 0) || !(s1 > 0)) return false;
    for (int i = 0; i <= grid; ++i) {
        if (!(hermite_slope(double(i) / grid, h, y0, y1, s0, s1) > 0)) return false;
    }
    return true;
}

namespace detail {

struct Node {
    virtual ~Node() = default;
    virtual CircleMap::Kind kind() const = 0;
    virtual int degree() const = 0;
    virtual double lift(double x) const = 0;
    virtual double dlift(double x) const = 0;
    virtual void dinfo(double x, DerivInfo& out) const = 0;
    virtual json to_json() const = 0;
    virtual void breaks(std::vector<double>&) const {}
};

namespace {

// Solve L(X) = Y for an increasing lift on [lo, hi] with L(lo) <= Y <= L(hi).
double bisect_lift(const Node& n, double y, double lo, double hi) {
    for (int it = 0; it < kMaxBisect; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (n.lift(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct RotationNode final : Node {
    Real angle;
    explicit RotationNode(Real a) : angle(a) {}
    CircleMap::Kind kind() const override { return CircleMap::Kind::Rotation; }
    int degree() const override { return 1; }
    double lift(double x) const override { return x + angle.v; }
    double dlift(double) const override { return 1.0; }
    void dinfo(double, DerivInfo& out) const override { out.value = 1.0; }
    json to_json() const override { return {{"kind", "rotation"}, {"angle", to_json_value(angle)}}; }
};

struct PiecewiseNode final : Node {
    std::vector<Real> brk;
    std::vector<Piece> pieces;
    int deg;
    std::vector<double> b;  // cached doubles

    PiecewiseNode(std::vector<Real> br, std::vector<Piece> pc, int d)
        : brk(std::move(br)), pieces(std::move(pc)), deg(d) {
        for (const Real& r : brk) b.push_back(r.v);
    }

    CircleMap::Kind kind() const override { return CircleMap::Kind::Piecewise; }
    int degree() const override { return deg; }

    double piece_value(std::size_t i, double x) const {
        const Piece& p = pieces[i];
        if (p.kind == Piece::Kind::Poly) {
            double acc = 0.0;
            for (std::size_t k = p.coeffs.size(); k-- > 0;) acc = acc * x + p.coeffs[k].v;
            return acc;
        }
        double h = b[i + 1] - b[i];
        return hermite_value((x - b[i]) / h, h, p.y0, p.y1, p.s0, p.s1);
    }

    double piece_slope(std::size_t i, double x) const {
        const Piece& p = pieces[i];
        if (p.kind == Piece::Kind::Poly) {
            double acc = 0.0;
            for (std::size_t k = p.coeffs.size(); k-- > 1;) acc = acc * x + double(k) * p.coeffs[k].v;
            return acc;
        }
        double h = b[i + 1] - b[i];
        return hermite_slope((x - b[i]) / h, h, p.y0, p.y1, p.s0, p.s1);
    }

    // Reduce x to [b0, b0+1) and return the turn count.
    double reduce(double x, double& k) const {
        k = std::floor(x - b.front());
        double r = x - k;
        if (r >= b.back()) {
            r -= 1.0;
            k += 1.0;
        }
        if (r < b.front()) r = b.front();
        return r;
    }

    std::size_t locate(double r) const {
        auto it = std::upper_bound(b.begin(), b.end(), r);
        std::size_t i = std::size_t(it - b.begin());
        if (i == 0) return 0;
        return std::min(i - 1, pieces.size() - 1);
    }

    double lift(double x) const override {
        double k;
        double r = reduce(x, k);
        return piece_value(locate(r), r) + k * deg;
    }

    double dlift(double x) const override {
        double k;
        double r = reduce(x, k);
        return piece_slope(locate(r), r);
    }

    void dinfo(double x, DerivInfo& out) const override {
        double k;
        double r = reduce(x, k);
        std::size_t i = locate(r);
        out.value = piece_slope(i, r);
        const double eps = 1e-13;
        std::size_t left = pieces.size();
        if (std::fabs(r - b[i]) <= eps) {
            left = (i == 0) ? pieces.size() - 1 : i - 1;
        } else if (std::fabs(r - b[i + 1]) <= eps) {
            // Rounded just below a break; report the right-hand piece.
            std::size_t j = (i + 1 == pieces.size()) ? 0 : i + 1;
            double xr = (i + 1 == pieces.size()) ? b.front() : b[i + 1];
            out.value = piece_slope(j, xr);
            left = i;
            i = j;
        }
        if (left != pieces.size()) {
            out.at_break = true;
            double xl = (left + 1 == pieces.size()) ? b.back() : b[left + 1];
            double dl = piece_slope(left, xl);
            if (std::fabs(dl - out.value) > kTolDeriv) out.nondifferentiable = true;
        }
    }

    json to_json() const override {
        json br = json::array();
        for (const Real& r : brk) br.push_back(to_json_value(r));
        json ps = json::array();
        for (const Piece& p : pieces) {
            if (p.kind == Piece::Kind::Poly) {
                json c = json::array();
                for (const Real& r : p.coeffs) c.push_back(to_json_value(r));
                ps.push_back({{"type", "poly"}, {"coeffs", c}});
            } else {
                ps.push_back({{"type", "hermite"},
                              {"y0", to_json_value(p.y0)},
                              {"y1", to_json_value(p.y1)},
                              {"s0", to_json_value(p.s0)},
                              {"s1", to_json_value(p.s1)}});
            }
        }
        return {{"kind", "piecewise"}, {"degree", deg}, {"breaks", br}, {"pieces", ps}};
    }

    void breaks(std::vector<double>& out) const override {
        for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back(wrap(b[i]));
    }
};

struct ComposeNode final : Node {
    std::vector<CircleMap> maps;
    int deg = 1;
    explicit ComposeNode(std::vector<CircleMap> m) : maps(std::move(m)) {
        for (const CircleMap& c : maps) deg *= c.degree();
    }
    CircleMap::Kind kind() const override { return CircleMap::Kind::Compose; }
    int degree() const override { return deg; }
    double lift(double x) const override {
        for (std::size_t i = maps.size(); i-- > 0;) x = maps[i].lift(x);
        return x;
    }
    double dlift(double x) const override {
        double d = 1.0;
        for (std::size_t i = maps.size(); i-- > 0;) {
            d *= maps[i].dlift(x);
            x = maps[i].lift(x);
        }
        return d;
    }
    void dinfo(double x, DerivInfo& out) const override {
        DerivInfo acc;
        acc.value = 1.0;
        for (std::size_t i = maps.size(); i-- > 0;) {
            DerivInfo d = maps[i].derivative_info(x);
            acc.value *= d.value;
            acc.at_break = acc.at_break || d.at_break;
            acc.nondifferentiable = acc.nondifferentiable || d.nondifferentiable;
            x = maps[i].lift(x);
        }
        out = acc;
    }
    json to_json() const override {
        json ms = json::array();
        for (const CircleMap& m : maps) ms.push_back(m.to_json());
        return {{"kind", "compose"}, {"maps", ms}};
    }
};

struct InverseNode final : Node {
    CircleMap inner;
    bool rotation;
    double angle = 0.0;
    explicit InverseNode(CircleMap m) : inner(std::move(m)) {
        if (inner.degree() != 1) throw NonInvertible("inverse requested for a map of degree > 1");
        rotation = inner.kind() == CircleMap::Kind::Rotation;
        if (rotation) angle = inner.angle();
    }
    CircleMap::Kind kind() const override { return CircleMap::Kind::Inverse; }
    int degree() const override { return 1; }

    double solve(double y) const {
        // L(x) - x is 1-periodic with oscillation < 1, so the root lies
        // within one unit of y - (L(y) - y).
        double guess = y - (inner.lift(y) - y);
        double lo = guess - 1.0, hi = guess + 1.0;
        const Node& n = inner.node();
        if (n.lift(lo) > y || n.lift(hi) < y) throw IllFormedMap("lift is not monotone; inverse bracket failed");
        return bisect_lift(n, y, lo, hi);
    }
    double lift(double y) const override { return rotation ? y - angle : solve(y); }
    double dlift(double y) const override { return rotation ? 1.0 : 1.0 / inner.dlift(solve(y)); }
    void dinfo(double y, DerivInfo& out) const override {
        if (rotation) {
            out.value = 1.0;
            return;
        }
        DerivInfo d = inner.derivative_info(solve(y));
        out.value = 1.0 / d.value;
        out.at_break = d.at_break;
        out.nondifferentiable = d.nondifferentiable;
    }
    json to_json() const override { return {{"kind", "inverse"}, {"map", inner.to_json()}}; }
};

struct SupportNode final : Node {
    CircleMap inner;
    Real start, length;
    SupportNode(CircleMap m, Real s, Real l) : inner(std::move(m)), start(s), length(l) {}
    CircleMap::Kind kind() const override { return CircleMap::Kind::IdentityOutsideArc; }
    int degree() const override { return 1; }
    double lift(double x) const override {
        double u = x - start.v;
        double k = std::floor(u);
        double t = u - k;
        if (t >= length.v) return x;
        return start.v + k + length.v * inner.lift(t / length.v);
    }
    double dlift(double x) const override {
        double u = x - start.v;
        double t = u - std::floor(u);
        if (t >= length.v) return 1.0;
        return inner.dlift(t / length.v);
    }
    void dinfo(double x, DerivInfo& out) const override {
        double u = x - start.v;
        double t = u - std::floor(u);
        if (t >= length.v) {
            out.value = 1.0;
            out.at_break = std::fabs(t - length.v) < 1e-13;
            return;
        }
        out = inner.derivative_info(t / length.v);
        if (t < 1e-13) out.at_break = true;
    }
    json to_json() const override {
        return {{"kind", "identity_outside_arc"},
                {"inner", inner.to_json()},
                {"start", to_json_value(start)},
                {"length", to_json_value(length)}};
    }
    void breaks(std::vector<double>& out) const override {
        out.push_back(wrap(start.v));
        out.push_back(wrap(start.v + length.v));
        for (double b : inner.breakpoints())
            if (b > 0.0) out.push_back(wrap(start.v + length.v * b));
    }
};

void check_piecewise(const PiecewiseNode& n) {
    const auto& b = n.b;
    if (b.size() < 2 || n.pieces.size() + 1 != b.size())
        throw IllFormedMap("piecewise map needs one more break than pieces");
    if (std::fabs(b.back() - b.front() - 1.0) > 1e-15)
        throw IllFormedMap("breaks must span exactly one turn");
    if (n.deg < 1) throw IllFormedMap("degree_of_cover must be >= 1");
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        if (!(b[i + 1] > b[i])) throw IllFormedMap("breaks must increase");
    for (std::size_t i = 0; i < n.pieces.size(); ++i) {
        const Piece& p = n.pieces[i];
        double h = b[i + 1] - b[i];
        if (p.kind == Piece::Kind::Hermite) {
            if (!hermite_monotone(h, p.y0, p.y1, p.s0, p.s1)) {
                std::ostringstream os;
                os << "Hermite piece " << i << " on [" << b[i] << "," << b[i + 1] << "] is not monotone";
                throw IllFormedMap(os.str());
            }
        } else {
            for (int k = 0; k <= 1000; ++k) {
                double x = b[i] + h * k / 1000.0;
                if (!(n.piece_slope(i, x) > 0)) {
                    std::ostringstream os;
                    os << "lift not increasing at x=" << x;
                    throw IllFormedMap(os.str());
                }
            }
        }
        double end_next = (i + 1 < n.pieces.size()) ? n.piece_value(i + 1, b[i + 1])
                                                    : n.piece_value(0, b.front()) + n.deg;
        double end_here = n.piece_value(i, b[i + 1]);
        if (std::fabs(end_here - end_next) > 1e-12) {
            std::ostringstream os;
            os << "pieces do not join at x=" << b[i + 1] << " (" << end_here << " vs " << end_next << ")";
            throw IllFormedMap(os.str());
        }
    }
}

}  // namespace
}  // namespace detail

CircleMap::CircleMap() : node_(std::make_shared<detail::RotationNode>(Q(0))) {}

CircleMap CircleMap::rotation(Real angle) { return CircleMap(std::make_shared<detail::RotationNode>(angle)); }

CircleMap CircleMap::piecewise(std::vector<Real> breaks, std::vector<Piece> pieces, int degree) {
    auto n = std::make_shared<detail::PiecewiseNode>(std::move(breaks), std::move(pieces), degree);
    detail::check_piecewise(*n);
    return CircleMap(n);
}

CircleMap CircleMap::hermite(const std::vector<Knot>& knots, int degree) {
    if (knots.size() < 2) throw IllFormedMap("need at least two knots");
    std::vector<Real> br;
    std::vector<Piece> pc;
    for (std::size_t i = 0; i < knots.size(); ++i) {
        br.push_back(knots[i].x);
        if (i + 1 < knots.size())
            pc.push_back(Piece::hermite(knots[i].y, knots[i + 1].y, knots[i].s, knots[i + 1].s));
    }
    return piecewise(std::move(br), std::move(pc), degree);
}

CircleMap CircleMap::compose(std::vector<CircleMap> maps) {
    if (maps.empty()) return CircleMap();
    if (maps.size() == 1) return maps[0];
    return CircleMap(std::make_shared<detail::ComposeNode>(std::move(maps)));
}

CircleMap CircleMap::inverse(CircleMap m) {
    return CircleMap(std::make_shared<detail::InverseNode>(std::move(m)));
}

CircleMap CircleMap::identity_outside_arc(CircleMap inner, Real start, Real length) {
    if (!(length.v > 0 && length.v <= 1)) throw IllFormedMap("support length must be in (0,1]");
    if (inner.degree() != 1) throw IllFormedMap("supported map must have degree 1");
    if (std::fabs(inner.lift(0.0)) > 1e-12 || std::fabs(inner.lift(1.0) - 1.0) > 1e-12)
        throw IllFormedMap("supported map must fix the ends of its support");
    return CircleMap(std::make_shared<detail::SupportNode>(std::move(inner), start, length));
}

CircleMap::Kind CircleMap::kind() const { return node_->kind(); }
int CircleMap::degree() const { return node_->degree(); }
double CircleMap::lift(double x) const { return node_->lift(x); }
double CircleMap::dlift(double x) const { return node_->dlift(x); }

DerivInfo CircleMap::derivative_info(double x) const {
    DerivInfo d;
    node_->dinfo(x, d);
    return d;
}

bool CircleMap::is_identity() const {
    return kind() == Kind::Rotation && angle() == 0.0;
}

double CircleMap::angle() const {
    if (kind() != Kind::Rotation) throw std::logic_error("not a rotation");
    return static_cast<const detail::RotationNode&>(*node_).angle.v;
}

std::vector<double> CircleMap::breakpoints() const {
    std::vector<double> out;
    node_->breaks(out);
    return out;
}

json CircleMap::to_json() const { return node_->to_json(); }

CircleMap CircleMap::from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw InputError("map spec must be an object with a \"kind\"");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return CircleMap();
    if (kind == "rotation") return rotation(real_from_json(j.at("angle")));
    if (kind == "piecewise") {
        std::vector<Real> br;
        for (const auto& v : j.at("breaks")) br.push_back(real_from_json(v));
        std::vector<Piece> pc;
        for (const auto& p : j.at("pieces")) {
            std::string t = p.at("type").get<std::string>();
            if (t == "poly") {
                std::vector<Real> c;
                for (const auto& v : p.at("coeffs")) c.push_back(real_from_json(v));
                pc.push_back(Piece::poly(std::move(c)));
            } else if (t == "hermite") {
                pc.push_back(Piece::hermite(real_from_json(p.at("y0")), real_from_json(p.at("y1")),
                                            real_from_json(p.at("s0")), real_from_json(p.at("s1"))));
            } else {
                throw InputError("unknown piece type: " + t);
            }
        }
        return piecewise(std::move(br), std::move(pc), j.value("degree", 1));
    }
    if (kind == "hermite") {
        std::vector<Knot> ks;
        for (const auto& k : j.at("knots"))
            ks.push_back({real_from_json(k.at(0)), real_from_json(k.at(1)), real_from_json(k.at(2))});
        return hermite(ks, j.value("degree", 1));
    }
    if (kind == "compose") {
        std::vector<CircleMap> ms;
        for (const auto& m : j.at("maps")) ms.push_back(from_json(m));
        return compose(std::move(ms));
    }
    if (kind == "inverse") return inverse(from_json(j.at("map")));
    if (kind == "identity_outside_arc")
        return identity_outside_arc(from_json(j.at("inner")), real_from_json(j.at("start")),
                                    real_from_json(j.at("length")));
    throw InputError("unknown map kind: " + kind);
}

double eval(const CircleMap& m, double x) { return m(x); }
double derivative(const CircleMap& m, double x) { return m.derivative_info(x).value; }
DerivInfo derivative_info(const CircleMap& m, double x) { return m.derivative_info(x); }

std::vector<double> inverse_branches(const CircleMap& m, double y) {
    const int d = m.degree();
    const double base = 0.0;
    const double l0 = m.lift(base);
    const int samples = 256 * d;
    double prev = l0;
    for (int i = 1; i <= samples; ++i) {
        double v = m.lift(base + double(i) / samples);
        if (!(v > prev)) throw IllFormedMap("lift not increasing on the fundamental interval");
        prev = v;
    }
    if (std::fabs(prev - l0 - d) > 1e-9) throw IllFormedMap("lift does not gain the degree over one turn");
    std::vector<double> out;
    double first = l0 + wrap(y - l0);
    for (int j = 0; j < d; ++j) {
        double target = first + j;
        out.push_back(wrap(detail::bisect_lift(m.node(), target, base, base + 1.0)));
    }
    std::sort(out.begin(), out.end());
    if (int(out.size()) != d) throw IllFormedMap("wrong number of preimages");
    return out;
}

std::vector<Knot> hermite_bridge(Real x0, Real y0, Real s0, Real x1, Real y1, Real s1) {
    double L = x1.v - x0.v, R = y1.v - y0.v;
    if (!(L > 0) || !(R > 0) || !(s0.v > 0) || !(s1.v > 0))
        throw IllFormedMap("bridge needs increasing data and positive slopes");
    if (hermite_monotone(L, y0, y1, s0, s1)) return {{x0, y0, s0}, {x1, y1, s1}};
    // Profile r on [0,1]: r(0)=0, r(1)=1, r'(0)=a, r'(1)=b, r' > 0.
    double a = s0.v * L / R, b = s1.v * L / R;
    double m = std::max(1.0, std::ceil(2.0 * (a + b)));
    double c = 1.0 - (a + b) / (m + 1.0);
    auto r = [&](double t) {
        return a * (1.0 - std::pow(1.0 - t, m + 1.0)) / (m + 1.0) + b * std::pow(t, m + 1.0) / (m + 1.0) +
               c * (3 * t * t - 2 * t * t * t);
    };
    auto dr = [&](double t) { return a * std::pow(1.0 - t, m) + b * std::pow(t, m) + 6.0 * c * t * (1.0 - t); };
    const double pi = std::acos(-1.0);
    for (int n = 4; n <= 8192; n *= 2) {
        std::vector<Knot> ks;
        ks.push_back({x0, y0, s0});
        for (int i = 1; i < n; ++i) {
            double t = 0.5 * (1.0 - std::cos(pi * i / n));
            ks.push_back({Real(x0.v + L * t), Real(y0.v + R * r(t)), Real(R / L * dr(t))});
        }
        ks.push_back({x1, y1, s1});
        bool ok = true;
        for (std::size_t i = 0; i + 1 < ks.size() && ok; ++i)
            ok = hermite_monotone(ks[i + 1].x.v - ks[i].x.v, ks[i].y, ks[i + 1].y, ks[i].s, ks[i + 1].s);
        if (ok) return ks;
    }
    throw IllFormedMap("could not build a monotone Hermite bridge");
}

CircleMap affine_skeleton(const std::vector<AffineSpan>& spans, int degree) {
    if (spans.empty()) throw IllFormedMap("affine skeleton needs at least one span");
    std::vector<Real> br;
    std::vector<Piece> pc;
    auto slope = [](const AffineSpan& s) { return (s.y1.v - s.y0.v) / (s.x1.v - s.x0.v); };
    auto affine = [&](const AffineSpan& s) {
        if (s.x0.exact() && s.x1.exact() && s.y0.exact() && s.y1.exact()) {
            auto [xn0, xd0] = *s.x0.ratio;
            auto [xn1, xd1] = *s.x1.ratio;
            auto [yn0, yd0] = *s.y0.ratio;
            auto [yn1, yd1] = *s.y1.ratio;
            // slope = (y1-y0)/(x1-x0), intercept = y0 - slope*x0, all exact.
            std::int64_t dyn = yn1 * yd0 - yn0 * yd1, dyd = yd0 * yd1;
            std::int64_t dxn = xn1 * xd0 - xn0 * xd1, dxd = xd0 * xd1;
            Real k = Q(dyn * dxd, dyd * dxn);
            auto [kn, kd] = *k.ratio;
            Real c = Q(yn0 * kd * xd0 - kn * xn0 * yd0, yd0 * kd * xd0);
            return Piece::poly({c, k});
        }
        double k = slope(s);
        return Piece::poly({Real(s.y0.v - k * s.x0.v), Real(k)});
    };
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const AffineSpan& s = spans[i];
        br.push_back(s.x0);
        pc.push_back(affine(s));
        AffineSpan next = spans[(i + 1) % spans.size()];
        Real nx0 = next.x0, ny0 = next.y0;
        if (i + 1 == spans.size()) {
            nx0 = spans[0].x0.exact() ? Q(spans[0].x0.ratio->first + spans[0].x0.ratio->second,
                                          spans[0].x0.ratio->second)
                                      : Real(spans[0].x0.v + 1.0);
            ny0 = spans[0].y0.exact() ? Q(spans[0].y0.ratio->first + degree * spans[0].y0.ratio->second,
                                          spans[0].y0.ratio->second)
                                      : Real(spans[0].y0.v + degree);
        }
        if (nx0.v > s.x1.v) {
            auto ks = hermite_bridge(s.x1, s.y1, Real(slope(s)), nx0, ny0, Real(slope(next)));
            for (std::size_t j = 0; j + 1 < ks.size(); ++j) {
                br.push_back(ks[j].x);
                pc.push_back(Piece::hermite(ks[j].y, ks[j + 1].y, ks[j].s, ks[j + 1].s));
            }
        } else if (nx0.v < s.x1.v) {
            throw IllFormedMap("affine spans overlap");
        }
    }
    br.push_back(spans[0].x0.exact()
                     ? Q(spans[0].x0.ratio->first + spans[0].x0.ratio->second, spans[0].x0.ratio->second)
                     : Real(spans[0].x0.v + 1.0));
    return CircleMap::piecewise(std::move(br), std::move(pc), degree);
}

CircleMap build_north_south(double attractor, double repeller, double contraction) {
    if (!(contraction > 0.0 && contraction < 1.0)) throw std::invalid_argument("contraction must lie in (0,1)");
    double a = wrap(attractor);
    double r = a + ccw(a, repeller);
    if (!(r > a)) throw std::invalid_argument("attractor and repeller must differ");
    auto k1 = hermite_bridge(a, a, contraction, r, r, 1.0 / contraction);
    auto k2 = hermite_bridge(r, r, 1.0 / contraction, a + 1.0, a + 1.0, contraction);
    std::vector<Knot> ks = k1;
    ks.insert(ks.end(), k2.begin() + 1, k2.end());
    return CircleMap::hermite(ks, 1);
}

CircleMap build_fig1_cover() {
    std::vector<Real> br = {Q(0), Q(1, 4), Q(1, 3), Q(5, 12), Q(1, 2), Q(1)};
    std::vector<Piece> pc = {
        Piece::poly({Q(0), Q(1), Q(-8), Q(32)}),
        Piece::poly({Q(-1, 2), Q(3)}),
        Piece::hermite(Q(1, 2), Q(5, 4), Q(3), Q(3)),
        Piece::poly({Q(0), Q(3)}),
        Piece::poly({Q(-3), Q(17), Q(-20), Q(8)}),
    };
    return CircleMap::piecewise(br, pc, 2);
}

std::pair<CircleMap, CircleMap> build_fig2_pair_normalized() {
    std::vector<Real> br = {Q(0), Q(1, 3), Q(2, 3), Q(1)};
    CircleMap f = CircleMap::piecewise(br,
                                       {
                                           Piece::poly({Q(0), Q(1), Q(1), Q(-3)}),
                                           Piece::poly({Q(1, 9), Q(2, 3)}),
                                           Piece::poly({Q(5), Q(-18), Q(23), Q(-9)}),
                                       },
                                       1);
    CircleMap g = CircleMap::piecewise(br,
                                       {
                                           Piece::poly({Q(0), Q(1), Q(4), Q(-9)}),
                                           Piece::poly({Q(2, 9), Q(2, 3)}),
                                           Piece::poly({Q(2), Q(-6), Q(8), Q(-3)}),
                                       },
                                       1);
    return {f, g};
}

Arc fig2_gap() { return Arc(5.0 / 18.0, 1.0 / 36.0); }

std::pair<CircleMap, CircleMap> build_fig2_pair() {
    auto [f, g] = build_fig2_pair_normalized();
    return {CircleMap::identity_outside_arc(f, Q(5, 18), Q(1, 36)),
            CircleMap::identity_outside_arc(g, Q(5, 18), Q(1, 36))};
}

CircleMap build_h() {
    return affine_skeleton({{Q(1, 4), Q(1, 2), Q(1, 4), Q(1)}}, 1);
}

std::pair<CircleMap, CircleMap> fig1_inverse_branches() {
    // y/3 + 1/6 and y/3 + 1/3 on [1/4,1/2], closed up to circle homeomorphisms.
    CircleMap a = affine_skeleton({{Q(1, 4), Q(1, 2), Q(1, 4), Q(1, 3)}}, 1);
    CircleMap b = affine_skeleton({{Q(1, 4), Q(1, 2), Q(5, 12), Q(1, 2)}}, 1);
    return {a, b};
}

}  // namespace ifs
