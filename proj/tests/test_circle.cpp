#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ifs/circle_map.hpp"
#include "ifs/errors.hpp"
#include "ifs/rng.hpp"

using namespace ifs;

namespace {

// Piece formulas of the gap pair, written out independently of the constructor.
double oracle_f(double x) {
    if (x <= 1.0 / 3) return -3 * x * x * x + x * x + x;
    if (x <= 2.0 / 3) return (2.0 / 3) * (x - 1.0 / 3) + 1.0 / 3;
    return -9 * x * x * x + 23 * x * x - 18 * x + 5;
}

double oracle_g(double x) {
    if (x <= 1.0 / 3) return x + 4 * x * x - 9 * x * x * x;
    if (x <= 2.0 / 3) return (2.0 / 3) * (x - 2.0 / 3) + 2.0 / 3;
    return -3 * x * x * x + 8 * x * x - 6 * x + 2;
}

// Lift of the degree-2 cover outside the bridge (1/3, 5/12).
double oracle_cover(double x) {
    if (x <= 0.25) return x - 8 * x * x + 32 * x * x * x;
    if (x <= 1.0 / 3) return 3 * (x - 0.25) + 0.25;
    if (x >= 5.0 / 12 && x <= 0.5) return 3 * (x - 0.5) + 0.5 + 1;
    return 8 * x * x * x - 20 * x * x + 17 * x - 4 + 1;
}

std::vector<CircleMap> homeomorphisms() {
    auto [f, g] = build_fig2_pair_normalized();
    auto [F, G] = build_fig2_pair();
    auto [a, b] = fig1_inverse_branches();
    return {CircleMap::rotation(std::sqrt(2.0) - 1), f, g, F, G, a, b, build_h(), build_north_south(0.25, 0.75, 0.5)};
}

double central_difference(const CircleMap& m, double x, double h = 1e-6) {
    return (m.lift(x + h) - m.lift(x - h)) / (2 * h);
}

bool near_break(const CircleMap& m, double x, double r) {
    for (double b : m.breakpoints())
        if (circ_dist(b, x) < r) return true;
    return false;
}

}  // namespace

TEST_CASE("rotation evaluation and inverse") {
    CHECK(eval(CircleMap::rotation(0.25), 0.9) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(eval(CircleMap::inverse(CircleMap::rotation(0.25)), 0.15) == doctest::Approx(0.9).epsilon(1e-12));
    for (double x : {0.0, 0.3, 0.77}) CHECK(derivative(CircleMap::rotation(0.123), x) == 1.0);
    auto br = inverse_branches(CircleMap::rotation(0.4), 0.1);
    REQUIRE(br.size() == 1);
    CHECK(br[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("rotation composition adds angles") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(), b = rng.uniform(), x = rng.uniform();
        CircleMap c = CircleMap::compose({CircleMap::rotation(a), CircleMap::rotation(b)});
        CHECK(circ_dist(c(x), wrap(x + a + b)) < 1e-15);
    }
}

TEST_CASE("gap pair matches the piece formulas") {
    auto [f, g] = build_fig2_pair_normalized();
    CHECK(f(0.5) == doctest::Approx(2 * 0.5 / 3 + 1.0 / 9).epsilon(1e-15));
    CHECK(f(1.0 / 3) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(g(2.0 / 3) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        CHECK(std::fabs(f.lift(x) - oracle_f(x)) < 1e-12);
        CHECK(std::fabs(g.lift(x) - oracle_g(x)) < 1e-12);
    }
}

TEST_CASE("degree-2 cover") {
    CircleMap H = build_fig1_cover();
    CHECK(H.degree() == 2);
    CHECK(H.lift(1.0) == doctest::Approx(H.lift(0.0) + 2).epsilon(1e-14));
    for (double x : {0.26, 0.3, 0.33}) CHECK(derivative(H, x) == doctest::Approx(3.0).epsilon(1e-12));
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        if (x > 1.0 / 3 && x < 5.0 / 12) continue;
        CHECK(std::fabs(H.lift(x) - oracle_cover(x)) < 1e-12);
    }

    auto b = inverse_branches(H, 0.3);
    REQUIRE(b.size() == 2);
    std::sort(b.begin(), b.end());
    CHECK(b[0] == doctest::Approx(0.3 / 3 + 1.0 / 6).epsilon(1e-11));
    CHECK(b[1] == doctest::Approx(0.3 / 3 + 1.0 / 3).epsilon(1e-11));
    for (double x : b) CHECK(circ_dist(H(x), 0.3) < kTolInv * 10);

    auto e = inverse_branches(H, 0.25);
    REQUIRE(e.size() == 2);
    std::sort(e.begin(), e.end());
    CHECK(std::fabs(e[0] - 0.25) < 1e-11);
    CHECK(std::fabs(e[1] - 5.0 / 12) < 1e-11);
}

TEST_CASE("h fixes 1/4 and sends 1/3 to 1/2") {
    CircleMap h = build_h();
    CHECK(std::fabs(h(0.25) - 0.25) < 1e-14);
    CHECK(std::fabs(h(1.0 / 3) - 0.5) < 1e-14);
    CHECK(derivative(h, 0.3) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("inverse round trip on homeomorphisms") {
    Rng rng(11);
    for (const CircleMap& m : homeomorphisms()) {
        CircleMap inv = CircleMap::inverse(m);
        double worst = 0;
        for (int i = 0; i < 1000; ++i) {
            double x = rng.uniform();
            worst = std::max(worst, circ_dist(inv(m(x)), x));
        }
        CHECK(worst <= 10 * kTolInv);
    }
}

TEST_CASE("derivative agrees with central differences") {
    Rng rng(13);
    std::vector<CircleMap> maps = homeomorphisms();
    maps.push_back(build_fig1_cover());
    for (const CircleMap& m : maps) {
        double worst = 0;
        for (int checked = 0; checked < 1000;) {
            double x = rng.uniform();
            if (near_break(m, x, 1e-4)) continue;
            worst = std::max(worst, std::fabs(central_difference(m, x) - derivative(m, x)));
            ++checked;
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("chain rule for Compose[f,f]") {
    auto [f, g] = build_fig2_pair_normalized();
    CircleMap ff = CircleMap::compose({f, f});
    for (double x : {0.1, 0.45, 0.55, 0.8}) {
        double expect = derivative(f, f(x)) * derivative(f, x);
        CHECK(derivative(ff, x) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::fabs(central_difference(ff, x) - expect) <= 1e-5);
    }
}

TEST_CASE("constructed lifts are continuous and strictly increasing") {
    std::vector<CircleMap> maps = homeomorphisms();
    maps.push_back(build_fig1_cover());
    for (const CircleMap& m : maps) {
        for (double b : m.breakpoints()) {
            double l = m.lift(b - 1e-13), r = m.lift(b + 1e-13);
            CHECK(std::fabs(l - r) < 1e-11);
        }
        double prev = m.lift(0.0);
        bool increasing = true;
        for (int i = 1; i <= 10000; ++i) {
            double v = m.lift(i / 10000.0);
            increasing = increasing && v > prev;
            prev = v;
        }
        CHECK(increasing);
        CHECK(std::fabs(m.lift(1.0) - m.lift(0.0) - m.degree()) < 1e-12);
    }
}

TEST_CASE("map specs round-trip through JSON") {
    Rng rng(5);
    std::vector<CircleMap> maps = homeomorphisms();
    maps.push_back(build_fig1_cover());
    for (const CircleMap& m : maps) {
        CircleMap back = CircleMap::from_json(m.to_json());
        CHECK(back.to_json() == m.to_json());
        for (int i = 0; i < 100; ++i) {
            double x = rng.uniform();
            CHECK(back.lift(x) == m.lift(x));
        }
    }
}

TEST_CASE("ill-formed specs are rejected") {
    // decreasing lift
    CHECK_THROWS_AS(CircleMap::piecewise({Q(0), Q(1)}, {Piece::poly({Q(0), Q(-1)})}, 1), IllFormedMap);
    // discontinuous junction
    CHECK_THROWS_AS(CircleMap::piecewise({Q(0), Q(1, 2), Q(1)}, {Piece::poly({Q(0), Q(1)}), Piece::poly({Real(0.1), Q(1)})}, 1),
                    IllFormedMap);
}

TEST_CASE("arcs") {
    Arc a(0.9, 0.2);
    CHECK(a.contains(0.95));
    CHECK(a.contains(0.05));
    CHECK_FALSE(a.contains(0.2));
    CHECK(a.depth(0.0) == doctest::Approx(0.1));
    CHECK(circ_dist(a.mid(), 0.0) < 1e-12);
    CHECK(a.contains_arc(Arc(0.95, 0.1)));
    CHECK_FALSE(a.contains_arc(Arc(0.95, 0.3)));
    CHECK(Arc::ball(0.5, 0.1).start == doctest::Approx(0.4));
    CHECK(Arc(0.3, 1.5).full());
    CHECK_THROWS(Arc(0.0, 0.0));
    ArcUnion u({Arc(0.1, 0.2), Arc(0.2, 0.2), Arc(0.7, 0.1)});
    CHECK(u.total_length() == doctest::Approx(0.4));
    CHECK(u.contains(0.35));
    CHECK_FALSE(u.contains(0.5));
}

TEST_CASE("splittable rng is reproducible") {
    Rng a(42), b(42);
    CHECK(a.split(3).uniform() == b.split(3).uniform());
    CHECK(a.split(3).key() != a.split(4).key());
}
