#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ifs/catalog.hpp"
#include "ifs/errors.hpp"
#include "ifs/hyperspace.hpp"
#include "ifs/rng.hpp"

using namespace ifs;

namespace {

double naive_hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
    auto directed = [](const std::vector<double>& p, const std::vector<double>& q) {
        double worst = 0;
        for (double x : p) {
            double best = 1;
            for (double y : q) best = std::min(best, circ_dist(x, y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

PointCloud random_cloud(Rng& rng, int max_n, double delta) {
    int n = rng.integer(1, max_n);
    std::vector<double> p;
    for (int i = 0; i < n; ++i) p.push_back(rng.uniform());
    return PointCloud(p, delta);
}

// Endpoints of the middle-thirds construction on [a,b] by explicit interval splitting.
std::vector<double> cantor_endpoints(double a, double b, int depth) {
    std::vector<std::pair<double, double>> iv = {{a, b}};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::pair<double, double>> next;
        for (auto [l, r] : iv) {
            double t = (r - l) / 3;
            next.push_back({l, l + t});
            next.push_back({r - t, r});
        }
        iv = std::move(next);
    }
    std::vector<double> out;
    for (auto [l, r] : iv) {
        out.push_back(l);
        out.push_back(r);
    }
    return out;
}

IfsSystem two_rotations() {
    double a = std::sqrt(2.0) - 1;
    return IfsSystem({CircleMap::rotation(a), CircleMap::rotation(a + 0.5)});
}

IfsSystem rotation_ms() { return make_rotation_morse_smale(std::sqrt(2.0) - 1, 0.25, 0.75, 0.5).system; }

}  // namespace

TEST_CASE("Hausdorff distance examples") {
    CHECK(hausdorff_distance(PointCloud({0.0}, kDefaultDelta), PointCloud({0.5}, kDefaultDelta)) == 0.5);
    PointCloud a({0, 0.25, 0.5, 0.75}, kDefaultDelta), b({0.125, 0.375, 0.625, 0.875}, kDefaultDelta);
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("sweep equals brute force exactly") {
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        PointCloud a = random_cloud(rng, 200, 1e-6), b = random_cloud(rng, 200, 1e-6);
        double s = hausdorff_distance(a, b);
        REQUIRE(s == hausdorff_distance_bruteforce(a, b));
        REQUIRE(s == naive_hausdorff(a.points(), b.points()));
    }
}

TEST_CASE("metric axioms on random clouds") {
    Rng rng(2);
    for (int t = 0; t < 300; ++t) {
        PointCloud a = random_cloud(rng, 200, 1e-4), b = random_cloud(rng, 200, 1e-4), c = random_cloud(rng, 200, 1e-4);
        CHECK(hausdorff_distance(a, b) == hausdorff_distance(b, a));
        CHECK(hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12);
        CHECK(hausdorff_distance(a, a) == 0.0);
        PointCloud a2(a.points(), a.resolution());
        CHECK(hausdorff_distance(a, a2) == 0.0);
        CHECK((hausdorff_distance(a, b) == 0.0) == (a == b));
    }
}

TEST_CASE("merging collapses close points cyclically") {
    auto m = merge_points({0.9999, 0.0001, 0.5, 0.50001}, 0.01);
    CHECK(m.size() == 2);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m[i] >= 0.0);
        CHECK(m[i] < 1.0);
        CHECK(circ_dist(m[i], m[(i + 1) % m.size()]) >= 0.005);
    }
}

TEST_CASE("Hutchinson step examples") {
    PointCloud s = hutchinson_step(IfsSystem({CircleMap::rotation(0.5)}), PointCloud({0.0}, kDefaultDelta));
    REQUIRE(s.size() == 1);
    CHECK(s.points()[0] == 0.5);

    NamedSystem nb = make_cantor_branches();
    PointCloud t = hutchinson_step(nb.system, PointCloud({0.25, 0.5}, kDefaultDelta));
    std::vector<double> expect = {0.25, 1.0 / 3, 5.0 / 12, 0.5};
    REQUIRE(t.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(t.points()[std::size_t(i)] - expect[std::size_t(i)]) < 1e-14);
}

TEST_CASE("Hutchinson operator is monotone") {
    Rng rng(3);
    IfsSystem F = rotation_ms();
    auto [f, g] = build_fig2_pair_normalized();
    IfsSystem G({f, g});
    for (int t = 0; t < 1000; ++t) {
        const IfsSystem& sys = t % 2 ? F : G;
        std::vector<double> big;
        int n = rng.integer(2, 60);
        for (int i = 0; i < n; ++i) big.push_back(rng.uniform());
        std::vector<double> small(big.begin(), big.begin() + rng.integer(1, n));
        // unmerged clouds so that inclusion is literal
        PointCloud A(small, 1e-12), B(big, 1e-12);
        PointCloud FA = hutchinson_step(sys, A, Exec::Serial), FB = hutchinson_step(sys, B, Exec::Serial);
        CHECK(directed_distance(FA, FB) == 0.0);
    }
}

TEST_CASE("full net is nearly fixed by invertible systems") {
    for (double delta : {1.0 / 512, 1.0 / 2048}) {
        PointCloud net = PointCloud::full_net(delta);
        for (const IfsSystem& F : {rotation_ms(), two_rotations()})
            CHECK(hausdorff_distance(hutchinson_step(F, net), net) <= 2 * delta);
    }
}

TEST_CASE("serial and parallel kernels agree") {
    IfsSystem F = rotation_ms();
    PointCloud s = PointCloud::full_net(1.0 / 512);
    CHECK(hutchinson_step(F, s, Exec::Serial) == hutchinson_step(F, s, Exec::Parallel));
    auto seeds = seed_grid(16);
    auto a = strict_attractor_probe(F, 0.02, seeds, 60, 1.0 / 512, Exec::Serial);
    auto b = strict_attractor_probe(F, 0.02, seeds, 60, 1.0 / 512, Exec::Parallel);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("Cantor branch iteration converges at rate 1/3") {
    NamedSystem nb = make_cantor_branches();
    const double delta = 1.0 / 4096;
    PointCloud K(cantor_endpoints(0.25, 0.5, 20), delta);
    PointCloud lib(middle_thirds_net(0.25, 0.5, 20), delta);
    CHECK(hausdorff_distance(K, lib) == 0.0);
    auto traj = iterate_to_attractor(nb.system, PointCloud({0.25, 0.5}, delta), 18, &K, {.throw_on_budget = false});
    for (auto [n, d] : traj) CHECK(d <= std::pow(1.0 / 3, n) * 0.25 + delta);
}

TEST_CASE("iteration from a point fills the circle for the rotation pair with a sink") {
    const double delta = 1.0 / 512;
    PointCloud net = PointCloud::full_net(delta);
    auto traj = iterate_to_attractor(rotation_ms(), PointCloud({0.0}, delta), 60, &net,
                                     {.stop_target_below = 2 * delta, .throw_on_budget = false});
    REQUIRE(!traj.empty());
    CHECK(traj.back().second < 2 * delta);
    // frozen on first run
    CHECK(traj.back().first == 11);
}

TEST_CASE("iteration budget exhaustion carries the partial trajectory") {
    try {
        iterate_to_attractor(two_rotations(), PointCloud({0.1}, kDefaultDelta), 3,
                             nullptr, {.stop_successive = 0.0});
        FAIL("expected BudgetExhausted");
    } catch (const BudgetExhausted& e) {
        CHECK(e.partial.size() == 3);
    }
}

TEST_CASE("strict attractor probe") {
    auto seeds = seed_grid(64);
    SUBCASE("two rotations with offset 1/2 are not a strict attractor") {
        auto r = strict_attractor_probe(two_rotations(), 0.01, seeds, 100);
        CHECK(r.verdict == Verdict::NotStrictAttractor);
    }
    SUBCASE("rotation with a Morse-Smale map") {
        auto r = strict_attractor_probe(rotation_ms(), 0.01, seeds, 200);
        CHECK(r.verdict == Verdict::StrictAttractorEvidence);
        REQUIRE(r.horizon_n0);
        CHECK(*r.horizon_n0 == 10);
    }
    SUBCASE("epsilon must exceed twice delta") {
        CHECK_THROWS(strict_attractor_probe(two_rotations(), 0.001, seeds, 10, 0.001));
    }
}

TEST_CASE("stability probe") {
    std::vector<Arc> arcs;
    for (int i = 0; i < 8; ++i) arcs.emplace_back(i / 8.0, 1.0 / 64);
    auto ok = stability_probe(rotation_ms(), 1.0 / 16, arcs, 100);
    CHECK_FALSE(ok.first_violation);
    auto bad = stability_probe(IfsSystem({CircleMap::identity()}), 1.0 / 256, {Arc(0.5, 1.0 / 64)}, 10);
    REQUIRE(bad.first_violation);
    CHECK(bad.first_violation->n == 0);
    CHECK(bad.first_violation->distance >= 1.0 / 256);
}

TEST_CASE("system specs round-trip") {
    IfsSystem F = rotation_ms();
    IfsSystem back = IfsSystem::from_json(F.to_json());
    CHECK(back.to_json() == F.to_json());
    CHECK(F.inverse().k() == 2);
}
