// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "ifs/catalog.hpp"
#include "ifs/probes.hpp"
#include "ifs/skewprod.hpp"

using namespace ifs;
using nlohmann::json;

namespace {

struct Check {
    bool ok = true;
    std::string note;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) note = what;
        ok = ok && cond;
    }
};

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

IfsSystem rotation_ms() { return catalog_lookup("rotation-morse-smale").system; }
IfsSystem two_rotations() { return catalog_lookup("two-rotations").system; }
IfsSystem gap_pair() { return catalog_lookup("fig2-pair").system; }

// f and g fix 1/3 and 2/3, so D is widened by 1/320 to give f(D) and g(D) room
// inside D; the widened D still keeps Df, Dg <= 0.6977.
const double kMargin = 1.0 / 320;
const Arc kB(0.35, 0.3), kD(1.0 / 3 - kMargin, 1.0 / 3 + 2 * kMargin);
const std::vector<Word> kBlendWords = {Word({1}), Word({2})};
constexpr std::uint64_t kPerturbSeed = 2024;

void hausdorff_oracle(Check& c) {
    Rng rng(1);
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> a(std::size_t(rng.integer(1, 200))), b(std::size_t(rng.integer(1, 200)));
        for (double& x : a) x = rng.uniform();
        for (double& x : b) x = rng.uniform();
        PointCloud A(a, 1e-9), B(b, 1e-9);
        double s = hausdorff_distance(A, B);
        if (s != hausdorff_distance_bruteforce(A, B) || s != naive_hausdorff(A.points(), B.points())) ++mismatches;
    }
    c.require(mismatches == 0, std::to_string(mismatches) + " mismatching pairs");
}

void cantor_rate(Check& c) {
    const double delta = 1.0 / 4096;
    IfsSystem F = catalog_lookup("cantor-branches").system;
    PointCloud K(middle_thirds_net(0.25, 0.5, 20), delta);
    PointCloud S({0.25, 0.5}, delta);
    for (int n = 1; n <= 18; ++n) {
        S = hutchinson_step(F, S);
        double d = hausdorff_distance(S, K), bound = std::pow(1.0 / 3, n) * 0.25 + 2 * delta;
        c.require(d <= bound, "n=" + std::to_string(n) + " d=" + std::to_string(d));
    }
}

void two_rotation_leaf(Check& c) {
    IfsSystem F = two_rotations();
    SymbolWindow w({}, {}, TailRule::constant(1));
    for (int d = 1; d <= 20; ++d) {
        LeafReport r = unstable_leaf_projection(F, w, 0.0, d, 1e-9);
        c.require(r.fiber_projection.size() == 2, "depth " + std::to_string(d) + " size " +
                                                      std::to_string(r.fiber_projection.size()));
        c.require(r.fiber_projection.nearest_distance(0.5) < 1e-9, "0.5 missing");
    }
    AttractorReport a = strict_attractor_probe(F, 0.01, seed_grid(64), 100);
    c.require(a.verdict == Verdict::NotStrictAttractor, "verdict " + to_string(a.verdict));
}

void single_rotation_leaf(Check& c) {
    IfsSystem F = catalog_lookup("single-rotation").system;
    LeafReport r = unstable_leaf_projection(F, SymbolWindow({}, {}, TailRule::constant(1)), 0.3, 50, 1e-9);
    c.require(r.fiber_projection.size() == 1 && circ_dist(r.fiber_projection.points()[0], 0.3) < 1e-9,
              "projection is not {x}");
}

void minimality_horizon(Check& c) {
    IfsSystem F = rotation_ms();
    for (Direction d : {Direction::Forward, Direction::Backward}) {
        const char* tag = d == Direction::Forward ? "forward" : "backward";
        DensityCertificate cert = certify_minimality(F, 1e-2, 64, 200, d);
        ReplayResult r = replay(F, cert);
        c.require(cert.complete(), std::string(tag) + " incomplete");
        c.require(r.ok() && r.failures.empty(), std::string(tag) + " replay failures");
    }
    AttractorReport a = strict_attractor_probe(F, 1e-2, seed_grid(64), 200, 1.0 / 2048);
    c.require(a.horizon_n0 && *a.horizon_n0 <= 200, "no uniform horizon");
    if (a.horizon_n0) c.note += "n0=" + std::to_string(*a.horizon_n0);
}

void blending_bootstrap(Check& c) {
    IfsSystem G = gap_pair();
    BlendingCertificate b = verify_blending(G, kB, kD, kBlendWords);
    c.require(b.contraction_beta <= 0.70, "beta " + std::to_string(b.contraction_beta));
    c.require(b.cover_slack > 0, "no cover slack");

    WordEvaluator ev(G);
    Rng rng = Rng(6).split(1);
    for (int i = 0; i < 32; ++i) {
        double x = b.region_B.at(rng.uniform(0.01, 0.99));
        Word w = target_word_search(G, b, x, 1e-3);
        c.require(circ_dist(ev.apply(w, b.region_B.mid()), x) <= 1e-3, "target replay missed");
    }

    IfsSystem F = rotation_ms();
    ExpandingCover cover = search_expanding_cover(F, 1.2, 60, 256);
    DensityCertificate base = certify_minimality(F, 0.05, 64, 200);
    DensityCertificate boot = bootstrap_density(F, cover, base, 5);
    const double target = 0.05 * std::pow(1.2, -5);
    c.require(boot.epsilon <= target * (1 + 1e-12), "epsilon " + std::to_string(boot.epsilon));
    c.require(replay(F, boot).ok(), "bootstrap replay failed");
    DirectCheck direct = direct_density_check(F, boot);
    c.require(direct.ok && direct.worst_gap_distance <= target, "direct check failed");
}

void non_density(Check& c) {
    NamedSystem s = catalog_lookup("cantor-preserving");
    const double delta = kDefaultDelta;
    PointCloud K(cantor_net(12), delta), net = PointCloud::full_net(delta);
    Rng rng(7);
    double worst = 0, nearest_full = 1;
    for (int t = 0; t < 20; ++t) {
        SymbolWindow w = random_window(rng, int(s.system.k()), 12);
        double x = K.points()[std::size_t(rng.integer(0, int(K.size()) - 1))];
        PointCloud p = stable_leaf_projection(s.system, w, x, 12, delta).fiber_projection;
        worst = std::max(worst, hausdorff_distance(p, K));
        nearest_full = std::min(nearest_full, hausdorff_distance(p, net));
    }
    c.require(worst <= 0.02, "d_H to K = " + std::to_string(worst));
    c.require(nearest_full >= 0.1, "d_H to full net = " + std::to_string(nearest_full));

    CircleMap h = catalog_lookup("cantor-preserving-h").system.maps.back();
    std::vector<double> img;
    for (double x : K.points()) img.push_back(h(x));
    PointCloud hK(img, delta);
    c.require(directed_distance(K, hK) <= delta, "K not inside h(K)");
    double far = 0;
    for (double y : hK.points()) far = std::max(far, K.nearest_distance(y));
    c.require(far >= 0.05, "no witness outside K");
    c.note += "worst d_H=" + std::to_string(worst) + " witness=" + std::to_string(far);
}

void skew_transitivity(Check& c) {
    IfsSystem F = two_rotations();
    DensityCertificate cert = certify_transitivity(F, 1.0 / 32, 32, 200);
    Rng rng(8);
    std::vector<SkewSample> samples;
    for (int t = 0; t < 50; ++t) {
        SkewSample s;
        for (Cylinder* cyl : {&s.C, &s.D}) {
            for (int i = rng.integer(0, 2); i > 0; --i) cyl->neg_word.push_back(rng.integer(1, 2));
            for (int i = rng.integer(0, 2); i > 0; --i) cyl->pos_word.push_back(rng.integer(1, 2));
        }
        s.U = Arc(rng.uniform(), 0.125);
        s.V = Arc(rng.uniform(), 0.125);
        samples.push_back(s);
    }
    int failures = skew_transitivity_check(F, cert, samples).failures();
    c.require(failures == 0, std::to_string(failures) + " failures");
}

void conjugacy(Check& c) {
    ConjugacyReport r = conjugacy_check(rotation_ms(), 1000, Rng(9), 20);
    c.require(r.max_discrepancy <= 10 * kTolInv, "discrepancy " + std::to_string(r.max_discrepancy));
}

void robustness(Check& c) {
    IfsSystem F = rotation_ms();
    IfsSystem P = perturb_system(F, 1e-3, kPerturbSeed);
    ExpandingCover cover = search_expanding_cover(F, 1.2, 60, 256);
    CoverCheck before = verify_expanding_cover(F, cover, 1.2);
    CoverCheck after = verify_expanding_cover(P, cover, 0.95 * 1.2);
    c.require(after.ok && after.covers, "perturbed cover fails");
    c.require(after.achieved_kappa >= 0.95 * before.achieved_kappa, "kappa dropped more than 5%");

    IfsSystem G = gap_pair();
    BlendingCertificate b0 = verify_blending(G, kB, kD, kBlendWords);
    BlendingCertificate b1 = verify_blending(perturb_system(G, 1e-3, kPerturbSeed), kB, kD, kBlendWords);
    c.require(b1.cover_slack > 0, "perturbed blending has no slack");
    c.note += "slack " + std::to_string(b0.cover_slack) + " -> " + std::to_string(b1.cover_slack) + "; ";

    // determinism across the criteria above, through the report pipeline
    std::vector<json> configs = {
        {{"system", "catalog:two-rotations"}, {"probe", {{"name", "unstable-leaf"}, {"params", {{"depth", 20}}}}}},
        {{"system", "catalog:two-rotations"}, {"probe", {{"name", "strict-attractor"}}}},
        {{"system", "catalog:single-rotation"}, {"probe", {{"name", "unstable-leaf"}}}},
        {{"system", "catalog:cantor-branches"}, {"probe", {{"name", "iterate"}}}},
        {{"system", "catalog:rotation-morse-smale"}, {"probe", {{"name", "minimality"}}}},
        {{"system", "catalog:fig2-pair"},
         {"probe", {{"name", "target-word"}, {"params", {{"random_targets", 32}}}}},
         {"rng_seed", 6}},
        {{"system", "catalog:cantor-preserving"}, {"probe", {{"name", "stable-leaf"}}}},
        {{"system", "catalog:two-rotations"}, {"probe", {{"name", "skew-transitivity"}}}, {"rng_seed", 8}},
        {{"system", "catalog:rotation-morse-smale"}, {"probe", {{"name", "conjugacy"}}}, {"rng_seed", 9}},
        {{"system", "catalog:rotation-morse-smale"},
         {"probe", {{"name", "expanding-cover"}, {"params", {{"perturb", 1e-3}}}}},
         {"rng_seed", kPerturbSeed}},
        {{"system", "catalog:fig2-pair"},
         {"probe", {{"name", "blending"}, {"params", {{"perturb", 1e-3}, {"D", {kD.start, kD.length}}}}}},
         {"rng_seed", kPerturbSeed}},
    };
    for (const json& j : configs) {
        RunConfig cfg = RunConfig::from_json(j);
        std::string a = execute(cfg).report.dump(), b = execute(cfg).report.dump();
        c.require(a == b, "non-deterministic report for " + cfg.probe);
    }
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 when the criterion states no limit
    std::function<void(Check&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Hausdorff sweep equals brute force", 2, hausdorff_oracle},
        {2, "Cantor attractor rate", 5, cantor_rate},
        {3, "two-rotation leaf and non-strict attractor", 5, two_rotation_leaf},
        {4, "single-rotation leaf", 0, single_rotation_leaf},
        {5, "minimality certificates and horizon", 60, minimality_horizon},
        {6, "blending, target words, bootstrap", 30, blending_bootstrap},
        {7, "non-density evidence and strictness", 30, non_density},
        {8, "skew-transitivity cross-check", 0, skew_transitivity},
        {9, "conjugacy fuzz", 0, conjugacy},
        {10, "robustness under perturbation, determinism", 0, robustness},
    };
    int failed = 0;
    for (const Criterion& cr : criteria) {
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.note = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cr.limit_seconds > 0 && secs >= cr.limit_seconds) {
            c.ok = false;
            c.note += " over time limit";
        }
        std::printf("%s criterion %2d: %-44s %7.2fs  %s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, secs,
                    c.note.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
