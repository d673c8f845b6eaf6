#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ifs/catalog.hpp"
#include "ifs/skewprod.hpp"

using namespace ifs;

TEST_CASE("catalog lookup") {
    auto names = catalog_names();
    CHECK(names.size() == 9);
    for (const auto& n : names) {
        NamedSystem s = catalog_lookup(n);
        CHECK(s.name == n);
        CHECK_FALSE(s.expected.empty());
        CHECK(IfsSystem::from_json(s.system.to_json()).to_json() == s.system.to_json());
        if (s.stand_in) CHECK(s.system.label.find("STAND-IN") != std::string::npos);
    }
    CHECK_THROWS_AS(catalog_lookup("nope"), InputError);
}

TEST_CASE("constructor preconditions and warnings") {
    CHECK_THROWS_AS(make_rotation_morse_smale(0.1, 0.25, 0.75, 1.0), InputError);
    CHECK(make_rotation_morse_smale(0.5, 0.25, 0.75, 0.5).warnings.size() == 1);
    CHECK(make_rotation_morse_smale(std::sqrt(2.0) - 1, 0.25, 0.75, 0.5).warnings.empty());
}

TEST_CASE("rotation examples") {
    SymbolWindow w({}, {}, TailRule::constant(1));
    SUBCASE("zero angle never leaves x") {
        IfsSystem F = make_single_rotation(0.0).system;
        PointCloud c = orbit_bfs(F, PointCloud({0.4}, 1e-9), 10, 1e-9);
        CHECK(c.size() == 1);
    }
    SUBCASE("angle 1/3 has an orbit of three points") {
        IfsSystem F = make_single_rotation(1.0 / 3).system;
        CHECK(orbit_bfs(F, PointCloud({0.1}, 1e-9), 10, 1e-9).size() == 3);
    }
    SUBCASE("equal rotations give a one-point leaf") {
        IfsSystem F = make_two_rotations(std::sqrt(2.0) - 1, {0, 1}).system;
        CHECK(unstable_leaf_projection(F, w, 0.7, 10, 1e-9).fiber_projection.size() == 1);
    }
    SUBCASE("offset 1/3 gives at most three points") {
        IfsSystem F = make_two_rotations(std::sqrt(3.0) - 1, {1, 3}).system;
        for (int d = 1; d <= 10; ++d) CHECK(unstable_leaf_projection(F, w, 0.7, d, 1e-9).fiber_projection.size() <= 3);
    }
}

TEST_CASE("Cantor nets") {
    auto k1 = cantor_net(1);
    std::vector<double> expect = {0.25, 5.0 / 18, 11.0 / 36, 1.0 / 3};
    REQUIRE(k1.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(k1[std::size_t(i)] - expect[std::size_t(i)]) < 1e-15);
    CHECK(cantor_net(12).size() == std::size_t(1) << 13);

    // K_1 also comes from one application of the two branches to the endpoints of I
    auto [b1, b2] = cantor_branches_I();
    std::set<double> img;
    for (double x : {0.25, 1.0 / 3})
        for (const CircleMap* b : {&b1, &b2}) img.insert(std::round((*b)(x) * 1e12) / 1e12);
    std::set<double> want;
    for (double x : expect) want.insert(std::round(x * 1e12) / 1e12);
    CHECK(img == want);
}

TEST_CASE("Cantor stand-in preserves K") {
    NamedSystem s = make_cantor_preserving_ifs(false);
    PointCloud K(cantor_net(10), 1e-7);
    for (const CircleMap& m : s.system.maps) {
        std::vector<double> img;
        for (double x : K.points()) img.push_back(m(x));
        // images are endpoint sets one level up or down
        CHECK(hausdorff_distance(PointCloud(img, 1e-7), K) <= std::pow(3.0, -8) / 12);
    }
}

TEST_CASE("Cantor group checks") {
    CantorChecks c = cantor_group_checks(12);
    CHECK(c.ok);
    CHECK(c.max_branch_step <= 1e-12);
    CHECK(c.h_containment <= kDefaultDelta);
    CHECK(c.strictness_witness == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.witness_distance >= 0.05);
    CHECK(std::fabs(build_h()(0.25) - 0.25) < 1e-15);
}

TEST_CASE("branch system converges to the Cantor net") {
    NamedSystem s = make_cantor_branches();
    const double delta = 1.0 / 4096;
    PointCloud K(middle_thirds_net(0.25, 0.5, 20), delta);
    auto traj = iterate_to_attractor(s.system, PointCloud({0.25, 0.5}, delta), 12, &K, {.throw_on_budget = false});
    for (auto [n, d] : traj) CHECK(d <= std::pow(3.0, -n) * 0.25 + delta);
}

TEST_CASE("padding with identities") {
    NamedSystem two = make_two_rotations(std::sqrt(2.0) - 1, {1, 2});
    NamedSystem same = pad_with_identity(two, 2);
    CHECK(same.system.to_json() == two.system.to_json());
    NamedSystem three = pad_with_identity(two, 3);
    CHECK(three.system.k() == 3);
    // fiber words over the original symbols do not see the padding
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        SymbolWindow w = random_window(rng, 2, 10);
        double x = rng.uniform();
        long n = rng.integer(-10, 10);
        CHECK(fiber_word(two.system, w, x, n) == fiber_word(three.system, w, x, n));
    }
    CHECK_THROWS_AS(pad_with_identity(two, 1), InputError);
    CHECK(certify_minimality(three.system, 0.05, 8, 400).complete());
}
