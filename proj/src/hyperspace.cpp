#include "ifs/hyperspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ifs/errors.hpp"

#if defined(IFS_HAVE_OPENMP)
#include <omp.h>
#endif

namespace ifs {

using nlohmann::json;

int worker_count() {
#if defined(IFS_HAVE_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<double> merge_points(std::vector<double> pts, double delta) {
    for (double& p : pts) p = wrap(p);
    std::sort(pts.begin(), pts.end());
    const double gap = 0.5 * delta;
    std::vector<double> out;
    out.reserve(pts.size());
    for (double p : pts) {
        if (out.empty() || p - out.back() >= gap) out.push_back(p);
    }
    while (out.size() > 1 && out.front() + 1.0 - out.back() < gap) out.pop_back();
    return out;
}

PointCloud::PointCloud(std::vector<double> points, double delta) : delta_(delta) {
    if (!(delta > 0)) throw std::invalid_argument("cloud resolution must be positive");
    pts_ = merge_points(std::move(points), delta);
    if (pts_.empty()) throw std::invalid_argument("point cloud must be nonempty");
}

PointCloud PointCloud::full_net(double delta) {
    std::size_t n = std::size_t(std::llround(std::ceil(1.0 / delta)));
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = double(i) / double(n);
    return PointCloud(std::move(p), delta);
}

double PointCloud::nearest_distance(double x) const {
    x = wrap(x);
    auto it = std::lower_bound(pts_.begin(), pts_.end(), x);
    std::size_t m = pts_.size();
    std::size_t j = std::size_t(it - pts_.begin());
    double d = circ_dist(x, pts_[j % m]);
    return std::min(d, circ_dist(x, pts_[(j + m - 1) % m]));
}

// Both lists sorted: the first point of `to` at or after each point of `from`
// only moves forward, so one pass suffices.
double directed_distance(const PointCloud& from, const PointCloud& to) {
    const auto& a = from.points();
    const auto& b = to.points();
    const std::size_t m = b.size();
    std::size_t j = 0;
    double worst = 0.0;
    for (double x : a) {
        while (j < m && b[j] < x) ++j;
        double d = std::min(circ_dist(x, b[j % m]), circ_dist(x, b[(j + m - 1) % m]));
        worst = std::max(worst, d);
    }
    return worst;
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
    return std::max(directed_distance(a, b), directed_distance(b, a));
}

double hausdorff_distance_bruteforce(const PointCloud& a, const PointCloud& b) {
    auto dir = [](const std::vector<double>& p, const std::vector<double>& q) {
        double worst = 0.0;
        for (double x : p) {
            double best = 1.0;
            for (double y : q) best = std::min(best, circ_dist(x, y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(dir(a.points(), b.points()), dir(b.points(), a.points()));
}

std::string cloud_csv(const PointCloud& c) {
    std::string out = "x\r\n";
    char buf[40];
    for (double p : c.points()) {
        std::snprintf(buf, sizeof buf, "%.17g\r\n", p);
        out += buf;
    }
    return out;
}

IfsSystem::IfsSystem(std::vector<CircleMap> m, std::string l) : maps(std::move(m)), label(std::move(l)) {
    if (maps.empty()) throw std::invalid_argument("an IFS needs at least one map");
}

bool IfsSystem::invertible() const {
    for (const CircleMap& m : maps)
        if (m.degree() != 1) return false;
    return true;
}

IfsSystem IfsSystem::inverse() const {
    if (!invertible()) throw NonInvertible("system has a map of degree > 1");
    std::vector<CircleMap> inv;
    for (const CircleMap& m : maps) {
        if (m.kind() == CircleMap::Kind::Rotation)
            inv.push_back(CircleMap::rotation(-m.angle()));
        else
            inv.push_back(CircleMap::inverse(m));
    }
    return IfsSystem(std::move(inv), label.empty() ? "" : label + "^-1");
}

json IfsSystem::to_json() const {
    json ms = json::array();
    for (const CircleMap& m : maps) ms.push_back(m.to_json());
    return {{"label", label}, {"maps", ms}};
}

IfsSystem IfsSystem::from_json(const json& j) {
    std::vector<CircleMap> ms;
    for (const auto& m : j.at("maps")) ms.push_back(CircleMap::from_json(m));
    if (ms.empty()) throw InputError("system has no maps");
    return IfsSystem(std::move(ms), j.value("label", ""));
}

PointCloud hutchinson_step(const IfsSystem& F, const PointCloud& S, Exec exec) {
    const auto& p = S.points();
    const std::size_t n = p.size(), k = F.k();
    std::vector<double> img(n * k);
    parallel_for(std::ptrdiff_t(k), exec, [&](std::ptrdiff_t i) {
        const CircleMap& f = F.maps[std::size_t(i)];
        for (std::size_t j = 0; j < n; ++j) img[std::size_t(i) * n + j] = f(p[j]);
    });
    return PointCloud(std::move(img), S.resolution());
}

std::vector<std::pair<int, double>> iterate_to_attractor(const IfsSystem& F, const PointCloud& S, int budget_n,
                                                         const PointCloud* target, IterateOptions opt,
                                                         Exec exec) {
    if (budget_n < 1) throw std::invalid_argument("budget_n must be >= 1");
    const double stop = opt.stop_successive.value_or(S.resolution() / 4.0);
    std::vector<std::pair<int, double>> traj;
    PointCloud cur = S;
    for (int n = 1; n <= budget_n; ++n) {
        PointCloud next = hutchinson_step(F, cur, exec);
        double step = hausdorff_distance(next, cur);
        double d = target ? hausdorff_distance(next, *target) : step;
        traj.emplace_back(n, d);
        cur = std::move(next);
        if (step < stop) return traj;
        if (target && opt.stop_target_below && d < *opt.stop_target_below) return traj;
    }
    if (opt.throw_on_budget) throw BudgetExhausted("iteration budget exhausted before convergence", traj);
    return traj;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::StrictAttractorEvidence: return "StrictAttractorEvidence";
        case Verdict::NotStrictAttractor: return "NotStrictAttractor";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

json arc_json(const Arc& a) { return {{"start", a.start}, {"length", a.length}}; }

json AttractorReport::to_json() const {
    json ws = json::array();
    for (const auto& w : witnesses)
        ws.push_back({{"seed", w.seed},
                      {"iterations", w.iterations},
                      {"final_distance", w.final_distance},
                      {"first_dense", w.first_dense},
                      {"last_sparse", w.last_sparse},
                      {"min_distance", w.min_distance}});
    json j = {{"verdict", to_string(verdict)}, {"epsilon", epsilon}, {"delta", delta},
              {"budget", budget},              {"witnesses", ws}};
    j["horizon_n0"] = horizon_n0 ? json(*horizon_n0) : json(nullptr);
    return j;
}

std::vector<double> seed_grid(int n) {
    std::vector<double> s(std::size_t(std::max(n, 0)));
    for (int i = 0; i < n; ++i) s[std::size_t(i)] = (i + 0.5) / n;
    return s;
}

AttractorReport strict_attractor_probe(const IfsSystem& F, double epsilon, const std::vector<double>& seeds,
                                       int budget_n, double delta, Exec exec) {
    if (!(epsilon > 2.0 * delta)) throw InputError("strict_attractor_probe needs epsilon > 2*delta");
    if (budget_n < 1) throw InputError("budget_n must be >= 1");
    if (seeds.empty()) throw InputError("no seeds");
    const PointCloud net = PointCloud::full_net(delta);
    AttractorReport rep;
    rep.epsilon = epsilon;
    rep.delta = delta;
    rep.budget = budget_n;
    rep.witnesses.resize(seeds.size());
    parallel_for(std::ptrdiff_t(seeds.size()), exec, [&](std::ptrdiff_t s) {
        AttractorWitness w;
        w.seed = seeds[std::size_t(s)];
        PointCloud cur({w.seed}, delta);
        double d = hausdorff_distance(cur, net);
        w.min_distance = d;
        bool frozen = false;
        for (int n = 1; n <= budget_n; ++n) {
            // A cloud equal to its predecessor is a fixed point of the step;
            // later iterates repeat it.
            if (!frozen) {
                PointCloud next = hutchinson_step(F, cur, Exec::Serial);
                frozen = next == cur;
                if (!frozen) {
                    cur = std::move(next);
                    d = hausdorff_distance(cur, net);
                }
            }
            w.min_distance = std::min(w.min_distance, d);
            bool dense = directed_distance(net, cur) <= epsilon;
            if (dense && w.first_dense < 0) w.first_dense = n;
            if (!dense) w.last_sparse = n;
            w.iterations = n;
        }
        w.final_distance = d;
        rep.witnesses[std::size_t(s)] = w;
    });
    int n0 = 0;
    bool all_dense = true, stuck = false;
    for (const auto& w : rep.witnesses) {
        if (w.last_sparse >= budget_n) all_dense = false;
        n0 = std::max(n0, w.last_sparse + 1);
        if (w.min_distance >= 2.0 * epsilon) stuck = true;
    }
    if (all_dense) {
        rep.verdict = Verdict::StrictAttractorEvidence;
        rep.horizon_n0 = n0;
    } else if (stuck) {
        rep.verdict = Verdict::NotStrictAttractor;
    } else {
        rep.verdict = Verdict::Inconclusive;
    }
    return rep;
}

json StabilityReport::to_json() const {
    json as = json::array();
    for (const auto& a : arcs) {
        json j = {{"arc", arc_json(a.arc)}, {"max_distance", a.max_distance}};
        if (a.violation)
            j["violation"] = {{"n", a.violation->n}, {"distance", a.violation->distance}};
        else
            j["violation"] = nullptr;
        as.push_back(j);
    }
    json j = {{"epsilon", epsilon}, {"budget", budget}, {"arcs", as}, {"empirical_delta", empirical_delta}};
    if (first_violation)
        j["first_violation"] = {{"arc", arc_json(first_violation->arc)},
                                {"n", first_violation->n},
                                {"distance", first_violation->distance}};
    else
        j["first_violation"] = nullptr;
    return j;
}

StabilityReport stability_probe(const IfsSystem& F, double epsilon, const std::vector<Arc>& deletion_arcs,
                                int budget_n, double delta, Exec exec) {
    if (budget_n < 0) throw InputError("budget_n must be >= 0");
    const PointCloud net = PointCloud::full_net(delta);
    StabilityReport rep;
    rep.epsilon = epsilon;
    rep.budget = budget_n;
    rep.arcs.resize(deletion_arcs.size());
    parallel_for(std::ptrdiff_t(deletion_arcs.size()), exec, [&](std::ptrdiff_t i) {
        const Arc& A = deletion_arcs[std::size_t(i)];
        StabilityReport::ArcResult r;
        r.arc = A;
        std::vector<double> kept;
        for (double p : net.points())
            if (!A.contains_open(p)) kept.push_back(p);
        if (kept.empty()) kept.push_back(A.start);
        PointCloud cur(std::move(kept), delta);
        for (int n = 0; n <= budget_n; ++n) {
            if (n > 0) cur = hutchinson_step(F, cur, Exec::Serial);
            double d = hausdorff_distance(cur, net);
            r.max_distance = std::max(r.max_distance, d);
            if (d >= epsilon) {
                r.violation = StabilityViolation{A, n, d};
                break;
            }
        }
        rep.arcs[std::size_t(i)] = r;
    });
    for (const auto& r : rep.arcs) {
        if (r.violation) {
            if (!rep.first_violation) rep.first_violation = r.violation;
        } else {
            rep.empirical_delta = std::max(rep.empirical_delta, r.arc.length);
        }
    }
    return rep;
}

}  // namespace ifs
