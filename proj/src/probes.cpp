#include "ifs/probes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "ifs/errors.hpp"
#include "ifs/semigroup.hpp"
#include "ifs/skewprod.hpp"

namespace ifs {

using nlohmann::json;

namespace {

double num(const json& p, const char* key, double def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_number()) throw InputError(std::string("parameter '") + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& p, const char* key, int def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_number()) throw InputError(std::string("parameter '") + key + "' must be an integer");
    double d = v.get<double>();
    if (d != std::floor(d) || std::fabs(d) > 1e9) throw InputError(std::string("parameter '") + key + "' must be an integer");
    return int(d);
}

Arc arc_param(const json& p, const char* key, Arc def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InputError(std::string("parameter '") + key + "' must be [start, length]");
    double len = v[1].get<double>();
    if (!(len > 0.0 && len <= 1.0)) throw InputError(std::string("parameter '") + key + "' needs length in (0,1]");
    return Arc(v[0].get<double>(), len);
}

std::vector<double> points_param(const json& p, const char* key, std::vector<double> def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw InputError(std::string("parameter '") + key + "' must be a nonempty list");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw InputError(std::string("parameter '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<int> symbols_param(const json& p, const char* key) {
    if (!p.contains(key)) return {};
    const json& v = p.at(key);
    if (!v.is_array()) throw InputError(std::string("parameter '") + key + "' must be a list of symbols");
    return v.get<std::vector<int>>();
}

Word word_of(const json& v) {
    if (v.is_array()) return Word(v.get<std::vector<int>>());
    if (v.is_object()) return Word::from_json(v);
    throw InputError("word must be a symbol list or an object");
}

std::vector<Word> words_param(const json& p, const char* key, std::vector<Word> def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_array() || v.empty()) throw InputError(std::string("parameter '") + key + "' must be a nonempty list");
    std::vector<Word> out;
    for (const auto& w : v) out.push_back(word_of(w));
    return out;
}

Direction direction_param(const json& p) {
    std::string d = p.value("direction", "forward");
    if (d == "forward") return Direction::Forward;
    if (d == "backward") return Direction::Backward;
    throw InputError("direction must be 'forward' or 'backward'");
}

SymbolWindow window_param(const json& p) {
    if (!p.contains("window")) return SymbolWindow({}, {}, TailRule::constant(1));
    return SymbolWindow::from_json(p.at("window"));
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

bool dense(const PointCloud& c, double eps, double delta) {
    return directed_distance(PointCloud::full_net(delta), c) <= eps;
}

using Probe = std::function<ProbeOutcome(const IfsSystem&, const json&, Rng&)>;

ProbeOutcome probe_strict(const IfsSystem& F0, const json& p, Rng&) {
    const IfsSystem F = direction_param(p) == Direction::Forward ? F0 : F0.inverse();
    double delta = num(p, "delta", kDefaultDelta);
    auto rep = strict_attractor_probe(F, num(p, "epsilon", 0.01), seed_grid(integer(p, "seeds", 64)),
                                      integer(p, "budget", 250), delta);
    ProbeOutcome o;
    o.verdict = to_string(rep.verdict);
    o.budget = rep.verdict == Verdict::Inconclusive;
    o.metric_name = "horizon_n0";
    o.metric = rep.horizon_n0 ? double(*rep.horizon_n0) : nan();
    o.report = rep.to_json();
    return o;
}

ProbeOutcome probe_stability(const IfsSystem& F, const json& p, Rng&) {
    std::vector<double> lengths = points_param(p, "deletion", {1.0 / 64});
    int positions = integer(p, "positions", 8);
    std::vector<Arc> arcs;
    for (double L : lengths) {
        if (!(L > 0.0 && L < 1.0)) throw InputError("deletion lengths must lie in (0,1)");
        for (int i = 0; i < positions; ++i) arcs.emplace_back(double(i) / positions, L);
    }
    auto rep = stability_probe(F, num(p, "epsilon", 1.0 / 16), arcs, integer(p, "budget", 100),
                               num(p, "delta", kDefaultDelta));
    ProbeOutcome o;
    o.verdict = rep.first_violation ? "Violation" : "Stable";
    o.metric_name = "empirical_delta";
    o.metric = rep.empirical_delta;
    o.report = rep.to_json();
    return o;
}

ProbeOutcome probe_iterate(const IfsSystem& F, const json& p, Rng&) {
    double delta = num(p, "delta", kDefaultDelta);
    PointCloud S(points_param(p, "start", {0.0}), delta);
    std::optional<PointCloud> target;
    if (p.contains("target")) {
        const json& t = p.at("target");
        if (t == "full-net") {
            target = PointCloud::full_net(delta);
        } else if (t.is_object() && t.contains("cantor")) {
            const json& c = t.at("cantor");
            target = PointCloud(middle_thirds_net(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<int>()),
                                delta);
        } else {
            throw InputError("target must be \"full-net\" or {\"cantor\": [a, b, depth]}");
        }
    }
    IterateOptions opt;
    opt.throw_on_budget = p.value("strict_budget", false);
    if (p.contains("stop_successive")) opt.stop_successive = num(p, "stop_successive", 0.0);
    ProbeOutcome o;
    o.metric_name = "last_distance";
    std::vector<std::pair<int, double>> traj;
    try {
        // "depth" is accepted as an alias so sweeps read naturally
        traj = iterate_to_attractor(F, S, integer(p, "depth", integer(p, "budget", 20)), target ? &*target : nullptr,
                                    opt);
        o.verdict = "Completed";
    } catch (const BudgetExhausted& e) {
        traj = e.partial;
        o.verdict = "BudgetExhausted";
        o.budget = true;
    }
    json tj = json::array();
    for (auto [n, d] : traj) tj.push_back({n, d});
    o.metric = traj.empty() ? nan() : traj.back().second;
    o.report = {{"trajectory", tj}, {"steps", traj.size()}};
    return o;
}

ProbeOutcome probe_orbit(const IfsSystem& F, const json& p, Rng&) {
    double delta = num(p, "delta", kDefaultDelta);
    PointCloud start(points_param(p, "start", {0.0}), delta);
    PointCloud c = orbit_bfs(F, start, integer(p, "depth", 20), delta);
    double eps = num(p, "epsilon", 0.01);
    ProbeOutcome o;
    o.verdict = dense(c, eps, delta) ? "Dense" : "NotDense";
    o.metric_name = "size";
    o.metric = double(c.size());
    o.report = {{"size", c.size()}, {"net_distance", directed_distance(PointCloud::full_net(delta), c)}};
    o.cloud = c;
    return o;
}

json density_cert_json(const DensityCertificate& c) {
    json j = c.to_json();
    j["type"] = "density";
    return j;
}

ProbeOutcome density_outcome(const IfsSystem& F, const std::function<DensityCertificate()>& run) {
    ProbeOutcome o;
    o.metric_name = "witnesses";
    try {
        DensityCertificate c = run();
        ReplayResult r = replay(F, c);
        o.verdict = r.ok() ? "Complete" : "ReplayFailed";
        o.metric = double(c.witnesses.size());
        o.report = {{"witnesses", c.witnesses.size()}, {"replay_failures", r.failures}, {"n_balls", c.n_balls}};
        o.certificate = density_cert_json(c);
    } catch (const CertificateIncomplete& e) {
        o.verdict = "Incomplete";
        o.budget = true;
        o.metric = double(e.partial_certificate.witnesses.size());
        o.report = {{"message", e.what()}, {"uncovered", e.partial_certificate.uncovered.size()}};
        o.certificate = density_cert_json(e.partial_certificate);
    }
    return o;
}

ProbeOutcome probe_minimality(const IfsSystem& F, const json& p, Rng&) {
    return density_outcome(F, [&] {
        return certify_minimality(F, num(p, "epsilon", 0.01), integer(p, "grid", 64), integer(p, "depth", 200),
                                  direction_param(p), num(p, "delta", kDefaultDelta));
    });
}

ProbeOutcome probe_transitivity(const IfsSystem& F, const json& p, Rng&) {
    return density_outcome(F, [&] {
        return certify_transitivity(F, num(p, "epsilon", 1.0 / 32), integer(p, "arcs", 32), integer(p, "depth", 200),
                                    num(p, "delta", kDefaultDelta));
    });
}

ExpandingSearchOptions cover_options(const json& p) {
    ExpandingSearchOptions opt;
    opt.direction = direction_param(p);
    opt.margin_epsilon = num(p, "margin_epsilon", opt.margin_epsilon);
    opt.lebesgue = num(p, "lebesgue", opt.lebesgue);
    return opt;
}

ProbeOutcome probe_expanding(const IfsSystem& F, const json& p, Rng&) {
    ProbeOutcome o;
    o.metric_name = "achieved_kappa";
    double kappa = num(p, "kappa", 1.2);
    try {
        ExpandingCover c = search_expanding_cover(F, kappa, integer(p, "word_depth", 60), integer(p, "grid", 256),
                                                  cover_options(p));
        CoverCheck chk = verify_expanding_cover(F, c, kappa);
        o.verdict = chk.ok ? "Found" : "VerifyFailed";
        o.metric = chk.achieved_kappa;
        o.report = {{"balls", c.balls.size()}, {"achieved_kappa", chk.achieved_kappa}, {"covers", chk.covers}};
        json cj = c.to_json();
        cj["type"] = "expanding";
        o.certificate = cj;
    } catch (const NotFound& e) {
        o.verdict = "NotFound";
        o.budget = true;
        o.metric = nan();
        o.report = {{"message", e.what()}, {"uncovered", e.uncovered}};
    }
    return o;
}

ProbeOutcome probe_bootstrap(const IfsSystem& F, const json& p, Rng&) {
    const double eps = num(p, "epsilon", 0.05), kappa = num(p, "kappa", 1.2);
    const int rounds = integer(p, "rounds", 5);
    ProbeOutcome o;
    o.metric_name = "epsilon_final";
    try {
        ExpandingCover cover = search_expanding_cover(F, kappa, integer(p, "word_depth", 60),
                                                      integer(p, "cover_grid", 256), cover_options(p));
        DensityCertificate base = certify_minimality(F, eps, integer(p, "grid", 64), integer(p, "depth", 200),
                                                     direction_param(p), num(p, "delta", kDefaultDelta));
        DensityCertificate c = bootstrap_density(F, cover, base, rounds);
        ReplayResult r = replay(F, c);
        DirectCheck d = direct_density_check(F, c);
        o.verdict = r.ok() && d.ok ? "Complete" : "VerifyFailed";
        o.metric = c.epsilon;
        o.report = {{"epsilon_final", c.epsilon},
                    {"epsilon_target", eps * std::pow(kappa, -rounds)},
                    {"replay_failures", r.failures},
                    {"direct_check", {{"ok", d.ok}, {"worst_gap_distance", d.worst_gap_distance}}},
                    {"cover", cover.to_json()}};
        o.certificate = density_cert_json(c);
    } catch (const CertificateIncomplete& e) {
        o.verdict = "Incomplete";
        o.budget = true;
        o.metric = nan();
        o.report = {{"message", e.what()}};
    } catch (const NotFound& e) {
        o.verdict = "NotFound";
        o.budget = true;
        o.metric = nan();
        o.report = {{"message", e.what()}};
    } catch (const CoverMismatch& e) {
        o.verdict = "CoverMismatch";
        o.metric = nan();
        o.report = {{"message", e.what()}};
    }
    return o;
}

struct BlendingParams {
    Arc B, D;
    std::vector<Word> words;
};

BlendingParams blending_params(const json& p) {
    return {arc_param(p, "B", Arc(0.35, 0.3)), arc_param(p, "D", Arc(1.0 / 3, 1.0 / 3)),
            words_param(p, "words", {Word({1}), Word({2})})};
}

ProbeOutcome probe_blending(const IfsSystem& F, const json& p, Rng&) {
    BlendingParams bp = blending_params(p);
    ProbeOutcome o;
    o.metric_name = "contraction_beta";
    o.metric = nan();
    try {
        BlendingCertificate c = verify_blending(F, bp.B, bp.D, bp.words, integer(p, "grid", 1024));
        o.verdict = "Blending";
        o.metric = c.contraction_beta;
        o.report = {{"contraction_beta", c.contraction_beta}, {"cover_slack", c.cover_slack}};
        json cj = c.to_json();
        cj["type"] = "blending";
        o.certificate = cj;
    } catch (const CoverFails& e) {
        o.verdict = "CoverFails";
        o.report = {{"message", e.what()}, {"point", e.point}};
    } catch (const NotContracting& e) {
        o.verdict = "NotContracting";
        o.report = {{"message", e.what()}, {"word", e.word_index}, {"point", e.point}};
    }
    return o;
}

ProbeOutcome probe_target_word(const IfsSystem& F, const json& p, Rng& rng) {
    BlendingParams bp = blending_params(p);
    BlendingCertificate c = verify_blending(F, bp.B, bp.D, bp.words);
    double tol = num(p, "tol", 1e-3);
    std::vector<double> targets = points_param(p, "target", {c.region_B.mid()});
    Rng r = rng.split(1);
    for (int i = 0; i < integer(p, "random_targets", 0); ++i)
        targets.push_back(c.region_B.at(r.uniform(0.01, 0.99)));
    ProbeOutcome o;
    o.metric_name = "max_word_length";
    json found = json::array();
    std::size_t longest = 0;
    try {
        for (double x : targets) {
            Word w = target_word_search(F, c, x, tol);
            longest = std::max(longest, w.size());
            found.push_back({{"target", x}, {"word", w.to_json()}});
        }
        o.verdict = "Found";
    } catch (const NoBranch& e) {
        o.verdict = "NoBranch";
        o.report["message"] = e.what();
        o.report["point"] = e.point;
    }
    o.metric = double(longest);
    o.report["words"] = found;
    return o;
}

ProbeOutcome probe_globalization(const IfsSystem& F, const json& p, Rng&) {
    Arc B = arc_param(p, "B", Arc(0.0, 0.1));
    std::vector<Word> def;
    for (int j = 1; j <= integer(p, "rotation_words", 0); ++j) def.push_back(Word(std::vector<int>(std::size_t(j), 1)));
    std::vector<Word> fw = words_param(p, "forward_words", def), bw = words_param(p, "backward_words", fw);
    if (fw.empty()) throw InputError("globalization needs forward_words or rotation_words");
    auto rep = verify_globalization(F, B, fw, bw, integer(p, "grid", 2048));
    ProbeOutcome o;
    o.verdict = rep.ok() ? "Globalized" : "NotGlobalized";
    o.metric_name = "uncovered";
    o.metric = double(rep.forward_uncovered.size() + rep.backward_uncovered.size());
    o.report = rep.to_json();
    return o;
}

ProbeOutcome probe_absorbing(const IfsSystem& F, const json& p, Rng&) {
    if (!p.contains("arcs") || !p.at("arcs").is_array()) throw InputError("absorbing needs 'arcs': [[start, length], ...]");
    std::vector<Arc> arcs;
    for (const auto& a : p.at("arcs")) arcs.push_back(arc_param(json{{"a", a}}, "a", Arc()));
    bool abs = check_absorbing_domain(F, ArcUnion(arcs));
    ProbeOutcome o;
    o.verdict = abs ? "Absorbing" : "NotAbsorbing";
    o.metric_name = "absorbing";
    o.metric = abs ? 1.0 : 0.0;
    return o;
}

ProbeOutcome probe_leaf(const IfsSystem& F, const json& p, bool unstable) {
    double delta = num(p, "delta", kDefaultDelta);
    SymbolWindow w = window_param(p);
    double x = num(p, "x", 0.0);
    int depth = integer(p, "depth", 20);
    LeafReport r = unstable ? unstable_leaf_projection(F, w, x, depth, delta)
                            : stable_leaf_projection(F, w, x, depth, delta);
    double eps = num(p, "epsilon", 0.01);
    // the density net is independent of the (possibly tiny) merge tolerance
    double net_delta = std::min(kDefaultDelta, eps / 4);
    ProbeOutcome o;
    o.verdict = dense(r.fiber_projection, eps, net_delta) ? "Dense" : "NotDense";
    o.metric_name = "projection_size";
    o.metric = double(r.fiber_projection.size());
    o.report = {{"projection_size", r.fiber_projection.size()},
                {"net_distance", directed_distance(PointCloud::full_net(net_delta), r.fiber_projection)},
                {"witnesses", r.witnesses.size()}};
    if (p.contains("cantor_depth")) {
        PointCloud K(cantor_net(integer(p, "cantor_depth", 12)), delta);
        o.report["cantor_distance"] = hausdorff_distance(r.fiber_projection, K);
    }
    o.cloud = r.fiber_projection;
    json cj = r.to_json();
    cj["type"] = "leaf";
    o.certificate = cj;
    return o;
}

ProbeOutcome probe_leaf_density(const IfsSystem& F, const json& p, Rng&) {
    double delta = num(p, "delta", kDefaultDelta);
    auto rep = strict_attractor_probe(F, num(p, "epsilon", 0.002), seed_grid(integer(p, "seeds", 64)),
                                      integer(p, "budget", 250), delta);
    Cylinder target;
    target.neg_word = symbols_param(p, "neg_word");
    target.pos_word = symbols_param(p, "pos_word");
    ProbeOutcome o;
    o.metric_name = "n";
    o.report["attractor"] = {{"verdict", to_string(rep.verdict)},
                             {"horizon_n0", rep.horizon_n0 ? json(*rep.horizon_n0) : json(nullptr)}};
    try {
        auto w = leaf_density_certify(F, rep, window_param(p), num(p, "x", 0.0), target,
                                      arc_param(p, "arc", Arc(0.0, 1.0 / 16)), delta);
        o.verdict = "Found";
        o.metric = w.n;
        o.report["witness"] = w.to_json();
    } catch (const SearchExhausted& e) {
        o.verdict = "SearchExhausted";
        o.budget = true;
        o.metric = nan();
        o.report["message"] = e.what();
    }
    return o;
}

ProbeOutcome probe_conjugacy(const IfsSystem& F, const json& p, Rng& rng) {
    auto rep = conjugacy_check(F, integer(p, "trials", 1000), rng.split(3), integer(p, "max_n", 20));
    ProbeOutcome o;
    o.verdict = rep.max_discrepancy <= 10 * kTolInv ? "Consistent" : "Inconsistent";
    o.metric_name = "max_discrepancy";
    o.metric = rep.max_discrepancy;
    o.report = rep.to_json();
    return o;
}

ProbeOutcome probe_skew_transitivity(const IfsSystem& F, const json& p, Rng& rng) {
    ProbeOutcome o;
    o.metric_name = "failures";
    DensityCertificate cert;
    try {
        cert = certify_transitivity(F, num(p, "epsilon", 1.0 / 32), integer(p, "arcs", 32), integer(p, "depth", 200),
                                    num(p, "delta", kDefaultDelta));
    } catch (const CertificateIncomplete& e) {
        o.verdict = "Incomplete";
        o.budget = true;
        o.metric = nan();
        o.report = {{"message", e.what()}};
        return o;
    }
    Rng r = rng.split(2);
    const int k = int(F.k()), maxlen = integer(p, "max_cylinder", 2);
    const double len = num(p, "arc_length", 0.125);
    std::vector<SkewSample> samples;
    for (int i = 0; i < integer(p, "samples", 50); ++i) {
        SkewSample s;
        for (Cylinder* c : {&s.C, &s.D}) {
            int a = r.integer(0, maxlen), b = r.integer(0, maxlen);
            for (int j = 0; j < a; ++j) c->neg_word.push_back(r.integer(1, k));
            for (int j = 0; j < b; ++j) c->pos_word.push_back(r.integer(1, k));
        }
        s.U = Arc(r.uniform(), len);
        s.V = Arc(r.uniform(), len);
        samples.push_back(s);
    }
    auto rep = skew_transitivity_check(F, cert, samples);
    o.verdict = rep.failures() == 0 ? "Verified" : "Failures";
    o.metric = rep.failures();
    o.report = rep.to_json();
    return o;
}

ProbeOutcome probe_cantor(const IfsSystem&, const json& p, Rng&) {
    CantorChecks c = cantor_group_checks(integer(p, "depth", 12), num(p, "delta", kDefaultDelta));
    ProbeOutcome o;
    o.verdict = c.ok ? "Verified" : "Failed";
    o.metric_name = "h_excess";
    o.metric = c.h_excess;
    o.report = c.to_json();
    return o;
}

const std::map<std::string, Probe>& probes() {
    static const std::map<std::string, Probe> m = {
        {"strict-attractor", probe_strict},
        {"stability", probe_stability},
        {"iterate", probe_iterate},
        {"orbit", probe_orbit},
        {"minimality", probe_minimality},
        {"transitivity", probe_transitivity},
        {"expanding-cover", probe_expanding},
        {"bootstrap", probe_bootstrap},
        {"blending", probe_blending},
        {"target-word", probe_target_word},
        {"globalization", probe_globalization},
        {"absorbing", probe_absorbing},
        {"unstable-leaf", [](const IfsSystem& F, const json& p, Rng&) { return probe_leaf(F, p, true); }},
        {"stable-leaf", [](const IfsSystem& F, const json& p, Rng&) { return probe_leaf(F, p, false); }},
        {"leaf-density", probe_leaf_density},
        {"conjugacy", probe_conjugacy},
        {"skew-transitivity", probe_skew_transitivity},
        {"cantor-checks", probe_cantor},
    };
    return m;
}

}  // namespace

std::vector<std::string> probe_names() {
    std::vector<std::string> out;
    for (const auto& [n, _] : probes()) out.push_back(n);
    return out;
}

void validate_probe_params(const std::string& probe, const json& p) {
    if (!probes().count(probe)) throw InputError("unknown probe: " + probe);
    if (!p.is_object()) throw InputError("probe params must be an object");
    for (const char* key : {"budget", "grid", "seeds", "arcs", "trials", "samples", "word_depth", "cover_grid",
                            "positions"}) {
        if (p.contains(key) && !(integer(p, key, 1) > 0)) throw InputError(std::string(key) + " must be positive");
    }
    if (p.contains("depth") && integer(p, "depth", 0) < 0) throw InputError("depth must be >= 0");
    if (p.contains("rounds") && integer(p, "rounds", 0) < 0) throw InputError("rounds must be >= 0");
    if (p.contains("delta") && !(num(p, "delta", 1.0) > 0)) throw InputError("delta must be positive");
    const bool eps_vs_delta = probe == "strict-attractor" || probe == "minimality" || probe == "transitivity" ||
                              probe == "bootstrap" || probe == "leaf-density" || probe == "skew-transitivity";
    if (eps_vs_delta && p.contains("epsilon")) {
        double eps = num(p, "epsilon", 0.0), delta = num(p, "delta", kDefaultDelta);
        if (!(eps > 2.0 * delta))
            throw InputError("epsilon must exceed 2*delta (epsilon=" + std::to_string(eps) +
                             ", delta=" + std::to_string(delta) + ")");
    }
    if (p.contains("perturb")) {
        double m = num(p, "perturb", 0.0);
        if (!(m >= 0.0 && m < 0.01)) throw InputError("perturb magnitude must lie in [0, 0.01)");
    }
}

ProbeOutcome run_probe(const IfsSystem& F0, const std::string& probe, const json& params, std::uint64_t rng_seed) {
    validate_probe_params(probe, params);
    Rng rng(rng_seed);
    double m = num(params, "perturb", 0.0);
    const IfsSystem F = m > 0.0 ? perturb_system(F0, m, rng.split(4).key()) : F0;
    return probes().at(probe)(F, params, rng);
}

json RunConfig::to_json() const {
    json out = {{"system", system}, {"probe", {{"name", probe}, {"params", params}}}, {"rng_seed", rng_seed}};
    if (expect) out["probe"]["expect"] = *expect;
    json o = json::object();
    if (report_path) o["report"] = *report_path;
    if (cloud_csv) o["cloud_csv"] = *cloud_csv;
    out["output"] = o;
    return out;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    RunConfig c;
    if (!j.contains("system")) throw InputError("config needs 'system'");
    c.system = j.at("system");
    if (!j.contains("probe")) throw InputError("config needs 'probe'");
    const json& p = j.at("probe");
    if (p.is_string()) {
        c.probe = p.get<std::string>();
    } else if (p.is_object()) {
        c.probe = p.value("name", "");
        if (p.contains("params")) c.params = p.at("params");
        if (p.contains("expect")) c.expect = p.at("expect").get<std::string>();
    } else {
        throw InputError("'probe' must be a name or an object");
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        if (o.contains("report")) c.report_path = o.at("report").get<std::string>();
        if (o.contains("cloud_csv")) c.cloud_csv = o.at("cloud_csv").get<std::string>();
    }
    if (j.contains("rng_seed")) {
        if (!j.at("rng_seed").is_number_integer()) throw InputError("rng_seed must be an integer");
        c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    }
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (!(system.is_string() || system.is_object())) throw InputError("system must be a catalog name or a map list");
    validate_probe_params(probe, params);
}

ResolvedSystem resolve_system(const json& spec) {
    ResolvedSystem r;
    if (spec.is_string()) {
        std::string s = spec.get<std::string>();
        const std::string prefix = "catalog:";
        if (s.rfind(prefix, 0) != 0) throw InputError("system string must be catalog:<name>");
        r.named = catalog_lookup(s.substr(prefix.size()));
        r.system = r.named->system;
        return r;
    }
    r.system = IfsSystem::from_json(spec);
    return r;
}

namespace {

// A catalog expectation for this probe, matched on direction when given.
const Expectation* find_expectation(const NamedSystem& ns, const std::string& probe, const json& params) {
    std::string dir = params.value("direction", "forward");
    for (const auto& e : ns.expected)
        if (e.probe == probe && e.params.value("direction", "forward") == dir) return &e;
    return nullptr;
}

int classify(const ProbeOutcome& o, const std::optional<std::string>& expected) {
    if (expected && o.verdict == *expected) return kExitExpected;
    if (o.budget) return kExitBudget;
    if (!expected) return kExitExpected;
    return kExitUnexpected;
}

}  // namespace

RunResult execute(const RunConfig& cfg) {
    cfg.validate();
    ResolvedSystem rs = resolve_system(cfg.system);
    json params = cfg.params;
    std::optional<std::string> expected = cfg.expect;
    if (rs.named) {
        if (const Expectation* e = find_expectation(*rs.named, cfg.probe, params)) {
            json merged = e->params;
            merged.update(params);
            params = merged;
            if (!expected) expected = e->verdict;
        }
    }
    validate_probe_params(cfg.probe, params);
    RunResult r;
    r.expected = expected;
    r.outcome = run_probe(rs.system, cfg.probe, params, cfg.rng_seed);
    r.exit_code = classify(r.outcome, expected);
    json rep = {{"config", cfg.to_json()},
                {"effective_params", params},
                {"probe", cfg.probe},
                {"verdict", r.outcome.verdict},
                {"expected", expected ? json(*expected) : json(nullptr)},
                {"exit_code", r.exit_code},
                {"metric", {{"name", r.outcome.metric_name},
                            {"value", std::isfinite(r.outcome.metric) ? json(r.outcome.metric) : json(nullptr)}}},
                {"result", r.outcome.report},
                {"system_label", rs.system.label}};
    if (rs.named) {
        rep["stand_in"] = rs.named->stand_in;
        rep["provenance"] = rs.named->provenance;
        if (!rs.named->warnings.empty()) rep["warnings"] = rs.named->warnings;
    }
    if (r.outcome.certificate) rep["certificate"] = *r.outcome.certificate;
    r.report = rep;
    return r;
}

SweepResult sweep(const RunConfig& cfg, const std::string& parameter, const std::vector<json>& values) {
    if (values.empty()) throw InputError("sweep needs at least one value");
    for (const auto& v : values)
        if (!v.is_number()) throw InputError("sweep values must be numeric");
    SweepResult out;
    std::string header;
    json rows = json::array();
    char buf[64];
    for (const auto& v : values) {
        RunConfig c = cfg;
        c.params[parameter] = v;
        RunResult r = execute(c);
        if (header.empty()) header = "value,verdict," + (r.outcome.metric_name.empty() ? "metric" : r.outcome.metric_name) + "\r\n";
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        std::string line = buf;
        line += "," + r.outcome.verdict + ",";
        if (std::isfinite(r.outcome.metric)) {
            std::snprintf(buf, sizeof buf, "%.17g", r.outcome.metric);
            line += buf;
        }
        out.csv += line + "\r\n";
        rows.push_back({{"value", v}, {"verdict", r.outcome.verdict}, {"exit_code", r.exit_code},
                        {"metric", std::isfinite(r.outcome.metric) ? json(r.outcome.metric) : json(nullptr)}});
        out.exit_code = std::max(out.exit_code, r.exit_code == kExitUnexpected ? 10 : r.exit_code);
    }
    if (out.exit_code == 10) out.exit_code = kExitUnexpected;
    out.csv = header + out.csv;
    out.report = {{"config", cfg.to_json()}, {"parameter", parameter}, {"rows", rows}};
    return out;
}

VerifyResult verify_report(const json& report) {
    VerifyResult v;
    if (!report.contains("certificate")) throw InputError("file holds no certificate");
    if (!report.contains("config")) throw InputError("file holds no config to rebuild the system");
    RunConfig cfg = RunConfig::from_json(report.at("config"));
    ResolvedSystem rs = resolve_system(cfg.system);
    json params = report.value("effective_params", cfg.params);
    Rng rng(cfg.rng_seed);
    double m = params.value("perturb", 0.0);
    const IfsSystem F = m > 0.0 ? perturb_system(rs.system, m, rng.split(4).key()) : rs.system;
    const json& c = report.at("certificate");
    v.kind = c.value("type", "");
    if (v.kind == "density") {
        DensityCertificate d = DensityCertificate::from_json(c);
        ReplayResult r = replay(F, d);
        v.failures = r.failures;
        v.ok = r.ok() && d.complete();
        if (!d.complete()) v.message = "certificate is incomplete";
    } else if (v.kind == "expanding") {
        ExpandingCover cov = ExpandingCover::from_json(c);
        CoverCheck chk = verify_expanding_cover(F, cov, cov.kappa);
        v.ok = chk.ok;
        if (chk.failing_ball >= 0) v.failures.push_back(chk.failing_ball);
        if (!chk.covers) v.message = "balls do not cover the circle";
    } else if (v.kind == "blending") {
        BlendingCertificate b = BlendingCertificate::from_json(c);
        try {
            BlendingCertificate again = verify_blending(F, b.region_B, b.domain_D, b.words);
            v.ok = again.contraction_beta <= b.contraction_beta + 1e-12 && again.cover_slack >= b.cover_slack - 1e-12;
            if (!v.ok) v.message = "recorded beta or slack not reproduced";
        } catch (const NotContracting& e) {
            v.failures.push_back(e.word_index);
            v.message = e.what();
        } catch (const CoverFails& e) {
            v.message = e.what();
        }
    } else if (v.kind == "leaf") {
        LeafReport r;
        r.kind = c.at("kind") == "unstable" ? LeafReport::Kind::Unstable : LeafReport::Kind::Stable;
        r.window = SymbolWindow::from_json(c.at("window"));
        r.x = c.at("x").get<double>();
        r.depth = c.at("depth").get<int>();
        for (const auto& w : c.at("witnesses"))
            r.witnesses.push_back({w.at("n").get<int>(), Word::from_json(w.at("sigma")), w.at("point").get<double>()});
        v.failures = replay_leaf(F, r);
        v.ok = v.failures.empty() && !r.witnesses.empty();
    } else {
        throw InputError("unknown certificate type: " + v.kind);
    }
    return v;
}

std::vector<CatalogRunLine> catalog_run(const std::string& name, std::uint64_t rng_seed) {
    NamedSystem ns = catalog_lookup(name);
    std::vector<CatalogRunLine> out;
    for (const auto& e : ns.expected) {
        auto t0 = std::chrono::steady_clock::now();
        CatalogRunLine line;
        line.expectation = e;
        try {
            line.verdict = run_probe(ns.system, e.probe, e.params, rng_seed).verdict;
        } catch (const std::exception& ex) {
            line.verdict = std::string("error: ") + ex.what();
        }
        line.pass = line.verdict == e.verdict;
        line.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(line);
    }
    return out;
}

}  // namespace ifs
