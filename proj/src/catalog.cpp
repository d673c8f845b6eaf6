#include "ifs/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "ifs/errors.hpp"

namespace ifs {

using nlohmann::json;

json NamedSystem::to_json() const {
    json ex = json::array();
    for (const auto& e : expected) ex.push_back({{"probe", e.probe}, {"verdict", e.verdict}, {"params", e.params}});
    json j = {{"name", name},         {"system", system.to_json()}, {"expected", ex},
              {"provenance", provenance}, {"stand_in", stand_in},      {"warnings", warnings}};
    return j;
}

namespace {

const double kSqrt2m1 = std::sqrt(2.0) - 1.0;

Real real_of(double v) {
    // Keep simple rationals exact so map specs round-trip.
    for (int q = 1; q <= 64; ++q) {
        double p = std::round(v * q);
        if (std::fabs(p - v * q) < 1e-12) return Q(std::int64_t(p), q);
    }
    return Real(v);
}

}  // namespace

NamedSystem make_single_rotation(double alpha) {
    NamedSystem s;
    s.name = "single-rotation";
    s.system = IfsSystem({CircleMap::rotation(real_of(alpha))}, "rotation");
    s.provenance = "one rotation: the unstable leaf projects to the single fiber point";
    s.expected = {
        {"unstable-leaf", "NotDense", {{"depth", 50}, {"x", 0.0}}},
        {"strict-attractor", "NotStrictAttractor", {{"epsilon", 0.01}, {"seeds", 8}, {"budget", 50}}},
        {"minimality", "Complete", {{"epsilon", 0.02}, {"grid", 8}, {"depth", 2000}}},
    };
    return s;
}

NamedSystem make_two_rotations(double alpha, std::pair<int, int> offset) {
    auto [p, q] = offset;
    if (q < 1) throw InputError("rational offset needs q >= 1");
    NamedSystem s;
    s.name = "two-rotations";
    s.system = IfsSystem({CircleMap::rotation(real_of(alpha)), CircleMap::rotation(real_of(alpha + double(p) / q))},
                         "two rotations");
    s.provenance = "rotations by alpha and alpha + p/q: minimal, yet the circle is not a strict attractor";
    s.expected = {
        {"minimality", "Complete", {{"epsilon", 0.01}, {"grid", 16}, {"depth", 400}}},
        {"strict-attractor", "NotStrictAttractor", {{"epsilon", 0.01}, {"seeds", 16}, {"budget", 60}}},
        {"unstable-leaf", "NotDense", {{"depth", 20}, {"x", 0.0}, {"delta", 1e-9}}},
        {"leaf-density",
         "SearchExhausted",
         {{"x", 0.0}, {"arc", {0.2, 0.1}}, {"epsilon", 0.01}, {"budget", 30}}},
    };
    return s;
}

NamedSystem make_rotation_morse_smale(double alpha, double attractor, double repeller, double contraction) {
    if (!(contraction > 0.0 && contraction < 1.0)) throw InputError("contraction must lie in (0,1)");
    if (circ_dist(attractor, repeller) == 0.0) throw InputError("attractor and repeller must differ");
    NamedSystem s;
    s.name = "rotation-morse-smale";
    s.system = IfsSystem({CircleMap::rotation(real_of(alpha)), build_north_south(attractor, repeller, contraction)},
                         "rotation + north-south");
    s.provenance = "irrational rotation with a north-south map: minimal and expanding in both time directions";
    for (int q = 1; q <= 1000; ++q) {
        if (std::fabs(alpha * q - std::round(alpha * q)) < 1e-9) {
            s.warnings.push_back("rotation angle is rational (denominator " + std::to_string(q) +
                                 "); minimality may fail");
            break;
        }
    }
    s.expected = {
        {"minimality", "Complete", {{"epsilon", 0.01}, {"grid", 64}, {"depth", 200}}},
        {"minimality", "Complete", {{"epsilon", 0.01}, {"grid", 64}, {"depth", 200}, {"direction", "backward"}}},
        {"strict-attractor", "StrictAttractorEvidence", {{"epsilon", 0.01}, {"seeds", 64}, {"budget", 250}}},
        {"strict-attractor",
         "StrictAttractorEvidence",
         {{"epsilon", 0.01}, {"seeds", 64}, {"budget", 250}, {"direction", "backward"}}},
        {"expanding-cover", "Found", {{"kappa", 1.2}, {"word_depth", 60}, {"grid", 256}}},
        {"expanding-cover", "Found", {{"kappa", 1.2}, {"word_depth", 60}, {"grid", 256}, {"direction", "backward"}}},
        {"bootstrap", "Complete", {{"epsilon", 0.05}, {"kappa", 1.2}, {"rounds", 5}}},
        {"unstable-leaf", "Dense", {{"depth", 60}, {"x", 0.1}, {"epsilon", 0.01}}},
        {"stable-leaf", "Dense", {{"depth", 60}, {"x", 0.1}, {"epsilon", 0.01}}},
        {"leaf-density", "Found", {{"x", 0.1}, {"arc", {0.6, 0.0625}}, {"neg_word", {2, 1}}, {"epsilon", 0.002}}},
        {"stability", "Stable", {{"epsilon", 0.0625}, {"deletion", 0.015625}, {"budget", 100}}},
    };
    return s;
}

std::vector<double> middle_thirds_net(double a, double b, int n) {
    if (n < 0) throw InputError("depth must be >= 0");
    std::vector<std::pair<double, double>> iv = {{a, b}};
    for (int d = 0; d < n; ++d) {
        std::vector<std::pair<double, double>> next;
        next.reserve(iv.size() * 2);
        for (auto [l, r] : iv) {
            double t = (r - l) / 3.0;
            next.emplace_back(l, l + t);
            next.emplace_back(r - t, r);
        }
        iv = std::move(next);
    }
    std::vector<double> out;
    out.reserve(iv.size() * 2);
    for (auto [l, r] : iv) {
        out.push_back(l);
        out.push_back(r);
    }
    return out;
}

std::vector<double> cantor_net(int n) { return middle_thirds_net(0.25, 1.0 / 3.0, n); }

std::pair<CircleMap, CircleMap> cantor_branches_I() {
    CircleMap a = affine_skeleton({{Q(1, 4), Q(1, 3), Q(1, 4), Q(5, 18)}}, 1);
    CircleMap b = affine_skeleton({{Q(1, 4), Q(1, 3), Q(11, 36), Q(1, 3)}}, 1);
    return {a, b};
}

NamedSystem make_cantor_group_instance() {
    auto [b1, b2] = cantor_branches_I();
    auto [f, g] = build_fig2_pair();
    NamedSystem s;
    s.name = "cantor-group";
    s.system = IfsSystem({build_fig1_cover(), b1, b2, f, g, build_h()}, "cover, branches, gap pair, h");
    s.provenance = "degree-2 cover with invariant Cantor set K_I, gap pair with a blending region, and h with h(K) > K";
    s.expected = {
        {"cantor-checks", "Verified", {{"depth", 12}}},
        // The gap pair acts on U = (5/18, 11/36); B and D in circle coordinates.
        {"blending",
         "Blending",
         {{"B", {5.0 / 18 + 0.35 / 36, 0.3 / 36}}, {"D", {5.0 / 18 + 1.0 / 108, 1.0 / 108}}, {"words", {{4}, {5}}}}},
    };
    return s;
}

NamedSystem make_cantor_preserving_ifs(bool with_h) {
    // Lift coordinates in units of 1/108: I = [27,36], L = [27,30], R = [33,36],
    // gap U1 = (30,33), outer gap O = (36, 27+108).
    auto u = [](std::int64_t n) { return Q(n, 108); };
    // G1: L_L -> L, L_R -> R_L, R -> R_R.
    CircleMap g1 = affine_skeleton({{u(27), u(28), u(27), u(30)},
                                    {u(29), u(30), u(33), u(34)},
                                    {u(33), u(36), u(35), u(36)}},
                                   1);
    // T: L -> R_R, U1 -> O, R_L -> L+1, (34,35) -> U1+1, R_R -> R_L+1, O -> (142,143).
    CircleMap t = affine_skeleton({{u(27), u(30), u(35), u(36)},
                                   {u(33), u(34), u(135), u(138)},
                                   {u(34), u(35), u(138), u(141)},
                                   {u(35), u(36), u(141), u(142)}},
                                  1);
    auto [f, g] = build_fig2_pair();
    std::vector<CircleMap> maps = {g1, t, f, g};
    if (with_h) maps.push_back(build_h());
    NamedSystem s;
    s.name = with_h ? "cantor-preserving-h" : "cantor-preserving";
    s.system = IfsSystem(std::move(maps), with_h ? "STAND-IN cantor-preserving + h" : "STAND-IN cantor-preserving");
    s.stand_in = true;
    s.provenance = with_h ? "STAND-IN: K_I is backward invariant only; h breaks forward invariance"
                          : "STAND-IN: every generator maps K_I onto itself; both leaf projections stay in K_I";
    const double gap_seed = 0.29;
    if (!with_h) {
        s.expected = {
            {"stable-leaf", "NotDense", {{"depth", 12}, {"x", 0.25}, {"epsilon", 0.02}}},
            {"unstable-leaf", "NotDense", {{"depth", 12}, {"x", 0.25}, {"epsilon", 0.02}}},
            {"orbit", "Dense", {{"start", {gap_seed}}, {"depth", 40}, {"epsilon", 1.0 / 32}}},
        };
    } else {
        // Symbols 1..4 keep the forward fiber word inside K_I.
        json window = {{"past", json::array()}, {"future", {1, 2, 3, 4}}, {"tail", {{"kind", "periodic"}}}};
        s.expected = {
            {"unstable-leaf", "Dense", {{"depth", 20}, {"x", gap_seed}, {"epsilon", 1.0 / 32}}},
            {"stable-leaf", "NotDense", {{"depth", 12}, {"x", 0.25}, {"epsilon", 0.02}, {"window", window}}},
        };
    }
    return s;
}

NamedSystem make_cantor_branches() {
    auto [a, b] = fig1_inverse_branches();
    NamedSystem s;
    s.name = "cantor-branches";
    s.system = IfsSystem({a, b}, "inverse branches y/3+1/6, y/3+1/3");
    s.provenance = "contracting branches of the degree-2 cover; attractor is the middle-thirds set of [1/4,1/2]";
    s.expected = {
        {"iterate",
         "Completed",
         {{"start", {0.25, 0.5}}, {"budget", 18}, {"delta", 1.0 / 4096}, {"target", {{"cantor", {0.25, 0.5, 20}}}}}},
    };
    return s;
}

NamedSystem make_fig2_pair() {
    auto [f, g] = build_fig2_pair_normalized();
    NamedSystem s;
    s.name = "fig2-pair";
    s.system = IfsSystem({f, g}, "gap pair (normalized)");
    s.provenance = "gap pair in normalized coordinates; (0.35,0.65) is a blending region inside (1/3,2/3)";
    json b = {{"B", {0.35, 0.3}}, {"D", {1.0 / 3, 1.0 / 3}}, {"words", {{1}, {2}}}};
    s.expected = {
        {"blending", "Blending", b},
        {"target-word", "Found", {{"B", {0.35, 0.3}}, {"D", {1.0 / 3, 1.0 / 3}}, {"target", 0.5}, {"tol", 1e-3}}},
        {"orbit", "Dense", {{"start", {0.5}}, {"depth", 12}, {"epsilon", 0.6}}},
    };
    return s;
}

NamedSystem make_cantor_symmetric() {
    NamedSystem base = make_cantor_preserving_ifs(false);
    std::vector<CircleMap> maps = base.system.maps;
    for (const CircleMap& m : base.system.maps) maps.push_back(CircleMap::inverse(m));
    NamedSystem s;
    s.name = "cantor-symmetric";
    s.system = IfsSystem(std::move(maps), "STAND-IN cantor-preserving, symmetric");
    s.stand_in = true;
    s.provenance = "STAND-IN: generators of the Cantor-preserving group and their inverses; transitive since gap orbits are dense";
    s.expected = {
        {"transitivity", "Complete", {{"epsilon", 1.0 / 32}, {"arcs", 32}, {"depth", 60}}},
    };
    return s;
}

NamedSystem pad_with_identity(const NamedSystem& sys, int k_target) {
    if (k_target < int(sys.system.k())) throw InputError("k_target below the current generator count");
    NamedSystem s = sys;
    while (int(s.system.k()) < k_target) s.system.maps.push_back(CircleMap::identity());
    if (k_target > int(sys.system.k())) {
        s.name += "+id" + std::to_string(k_target - int(sys.system.k()));
        s.system.label += " + identities";
    }
    return s;
}

namespace {

const std::vector<std::pair<std::string, std::function<NamedSystem()>>>& registry() {
    static const std::vector<std::pair<std::string, std::function<NamedSystem()>>> r = {
        {"single-rotation", [] { return make_single_rotation(kSqrt2m1); }},
        {"two-rotations", [] { return make_two_rotations(kSqrt2m1, {1, 2}); }},
        {"rotation-morse-smale", [] { return make_rotation_morse_smale(kSqrt2m1, 0.25, 0.75, 0.5); }},
        {"cantor-group", [] { return make_cantor_group_instance(); }},
        {"cantor-preserving", [] { return make_cantor_preserving_ifs(false); }},
        {"cantor-preserving-h", [] { return make_cantor_preserving_ifs(true); }},
        {"cantor-branches", [] { return make_cantor_branches(); }},
        {"fig2-pair", [] { return make_fig2_pair(); }},
        {"cantor-symmetric", [] { return make_cantor_symmetric(); }},
    };
    return r;
}

}  // namespace

std::vector<std::string> catalog_names() {
    std::vector<std::string> out;
    for (const auto& [n, _] : registry()) out.push_back(n);
    return out;
}

NamedSystem catalog_lookup(const std::string& name) {
    for (const auto& [n, make] : registry())
        if (n == name) return make();
    throw InputError("unknown catalog system: " + name);
}

json CantorChecks::to_json() const {
    return {{"max_branch_step", max_branch_step},   {"h_containment", h_containment},
            {"h_excess", h_excess},                 {"strictness_witness", strictness_witness},
            {"witness_distance", witness_distance}, {"ok", ok}};
}

CantorChecks cantor_group_checks(int depth, double delta) {
    const double fine = 1e-12;
    auto [b1, b2] = cantor_branches_I();
    IfsSystem branches({b1, b2});
    CircleMap h = build_h();
    CantorChecks c;
    for (int n = 0; n < depth; ++n) {
        PointCloud Kn(cantor_net(n), fine), Kn1(cantor_net(n + 1), fine);
        c.max_branch_step = std::max(c.max_branch_step, hausdorff_distance(hutchinson_step(branches, Kn, Exec::Serial), Kn1));
    }
    std::vector<double> K = cantor_net(depth), hK;
    for (double x : K) hK.push_back(h(x));
    PointCloud Kc(K, fine), hKc(hK, fine);
    c.h_containment = directed_distance(Kc, hKc);
    c.h_excess = hausdorff_distance(hKc, Kc);
    c.strictness_witness = h(1.0 / 3.0);
    c.witness_distance = Kc.nearest_distance(c.strictness_witness);
    c.ok = c.max_branch_step <= delta && c.h_containment <= delta && c.h_excess >= 0.05 && c.witness_distance >= 0.05;
    return c;
}

}  // namespace ifs
