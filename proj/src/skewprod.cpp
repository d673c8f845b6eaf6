#include "ifs/skewprod.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ifs {

using nlohmann::json;

SymbolWindow::SymbolWindow(std::vector<int> past, std::vector<int> future, TailRule tail)
    : past_(std::move(past)), future_(std::move(future)), tail_(tail) {
    if (tail_.block < 0) throw InputError("tail block length must be >= 0");
}

int SymbolWindow::base(long i) const {
    const long t = long(future_.size()), m = long(past_.size());
    if (i >= 0 && i < t) return future_[std::size_t(i)];
    if (i < 0 && i >= -m) return past_[std::size_t(m + i)];
    if (tail_.kind == TailRule::Kind::ConstantSymbol || (t == 0 && m == 0)) return tail_.symbol;
    if (i >= t) {
        const std::vector<int>& src = t > 0 ? future_ : past_;
        long n = long(src.size());
        long B = tail_.block > 0 ? std::min<long>(tail_.block, n) : n;
        return src[std::size_t(n - B + (i - t) % B)];
    }
    const std::vector<int>& src = m > 0 ? past_ : future_;
    long n = long(src.size());
    long B = tail_.block > 0 ? std::min<long>(tail_.block, n) : n;
    return src[std::size_t(((i + m) % B + B) % B)];
}

SymbolWindow SymbolWindow::shifted(long n) const {
    SymbolWindow w = *this;
    w.offset_ += sign_ * n;
    return w;
}

SymbolWindow SymbolWindow::involuted() const {
    SymbolWindow w = *this;
    w.offset_ = offset_ - sign_;
    w.sign_ = -sign_;
    return w;
}

void SymbolWindow::validate(int k) const {
    auto bad = [k](int s) { return s < 1 || s > k; };
    if (std::any_of(past_.begin(), past_.end(), bad) || std::any_of(future_.begin(), future_.end(), bad) ||
        (tail_.kind == TailRule::Kind::ConstantSymbol && bad(tail_.symbol)))
        throw InputError("window symbol out of range 1.." + std::to_string(k));
}

json SymbolWindow::to_json() const {
    json t = tail_.kind == TailRule::Kind::ConstantSymbol
                 ? json{{"kind", "constant"}, {"symbol", tail_.symbol}}
                 : json{{"kind", "periodic"}, {"block", tail_.block}};
    return {{"past", past_}, {"future", future_}, {"tail", t}, {"offset", offset_}, {"sign", sign_}};
}

SymbolWindow SymbolWindow::from_json(const json& j) {
    TailRule t;
    if (j.contains("tail")) {
        const json& tj = j.at("tail");
        std::string kind = tj.value("kind", "constant");
        if (kind == "constant")
            t = TailRule::constant(tj.value("symbol", 1));
        else if (kind == "periodic")
            t = TailRule::periodic(tj.value("block", 0));
        else
            throw InputError("unknown tail rule: " + kind);
    }
    SymbolWindow w(j.value("past", std::vector<int>{}), j.value("future", std::vector<int>{}), t);
    w.offset_ = j.value("offset", 0L);
    w.sign_ = j.value("sign", 1);
    if (w.sign_ != 1 && w.sign_ != -1) throw InputError("window sign must be +1 or -1");
    return w;
}

bool Cylinder::contains(const SymbolWindow& w) const {
    if (side != Side::PosOnly) {
        const long s = long(neg_word.size());
        for (long i = 0; i < s; ++i)
            if (w.at(i - s) != neg_word[std::size_t(i)]) return false;
    }
    if (side != Side::NegOnly) {
        for (std::size_t i = 0; i < pos_word.size(); ++i)
            if (w.at(long(i)) != pos_word[i]) return false;
    }
    return true;
}

json Cylinder::to_json() const {
    const char* s = side == Side::TwoSided ? "two-sided" : side == Side::NegOnly ? "neg-only" : "pos-only";
    return {{"neg_word", neg_word}, {"pos_word", pos_word}, {"side", s}};
}

double fiber_word(const IfsSystem& F, const SymbolWindow& w, double x, long n) {
    if (n >= 0) {
        for (long i = 0; i < n; ++i) x = F.map(w.at(i))(x);
        return x;
    }
    const IfsSystem inv = F.inverse();
    for (long i = -1; i >= n; --i) x = inv.map(w.at(i))(x);
    return x;
}

std::pair<SymbolWindow, double> skew_step(const IfsSystem& F, const SymbolWindow& w, double x, long n) {
    return {w.shifted(n), fiber_word(F, w, x, n)};
}

json ConjugacyReport::to_json() const { return {{"trials", trials}, {"max_discrepancy", max_discrepancy}}; }

SymbolWindow random_window(Rng& rng, int k, int half_length, TailRule tail) {
    auto past = std::vector<int>(std::size_t(half_length)), future = past;
    for (int& s : past) s = rng.integer(1, k);
    for (int& s : future) s = rng.integer(1, k);
    return SymbolWindow(std::move(past), std::move(future), tail);
}

ConjugacyReport conjugacy_check(const IfsSystem& F, int trials, Rng rng, int max_n) {
    const IfsSystem inv = F.inverse();
    const int k = int(F.k());
    ConjugacyReport r;
    r.trials = trials;
    for (int t = 0; t < trials; ++t) {
        long n = rng.integer(0, max_n);
        SymbolWindow w = random_window(rng, k, max_n + 5);
        double x = rng.uniform();
        double lhs = skew_step(F, w, x, -n).second;
        double rhs = skew_step(inv, w.involuted(), x, n).second;
        r.max_discrepancy = std::max(r.max_discrepancy, circ_dist(lhs, rhs));
    }
    return r;
}

json LeafReport::to_json() const {
    json ws = json::array();
    for (const auto& w : witnesses) ws.push_back({{"n", w.n}, {"sigma", w.sigma.to_json()}, {"point", w.point}});
    return {{"kind", kind == Kind::Unstable ? "unstable" : "stable"},
            {"window", window.to_json()},
            {"x", x},
            {"depth", depth},
            {"projection_size", fiber_projection.size()},
            {"fiber_projection", fiber_projection.points()},
            {"witnesses", ws}};
}

namespace {

// Levels F^n({y}) pruned per level, with the word that reached each survivor.
void level_witnesses(const IfsSystem& walk, Direction dir, double y, int n, double delta,
                     std::vector<LeafWitness>& out) {
    BfsTree t;
    t.nodes.push_back({wrap(y), -1, 0, 0});
    std::vector<int> frontier = {0}, next;
    for (int level = 1; level <= n; ++level) {
        CellSet seen(delta);
        next.clear();
        for (int p : frontier) {
            double x = t.nodes[std::size_t(p)].x;
            for (int s = 1; s <= int(walk.k()); ++s) {
                double z = walk.map(s)(x);
                if (!seen.insert(z)) continue;
                t.nodes.push_back({z, p, s, level});
                next.push_back(int(t.nodes.size()) - 1);
            }
        }
        std::swap(frontier, next);
    }
    for (int idx : frontier) out.push_back({n, t.word(idx, dir), t.nodes[std::size_t(idx)].x});
}

LeafReport leaf_impl(const IfsSystem& F, const SymbolWindow& w, double x, int depth, double delta,
                     LeafReport::Kind kind) {
    if (depth < 0) throw InputError("depth must be >= 0");
    if (!F.invertible()) throw NonInvertible("leaf projections need an invertible system");
    w.validate(int(F.k()));
    const bool unstable = kind == LeafReport::Kind::Unstable;
    const IfsSystem walk = unstable ? F : F.inverse();
    const Direction dir = unstable ? Direction::Forward : Direction::Backward;
    LeafReport r;
    r.kind = kind;
    r.window = w;
    r.x = wrap(x);
    r.depth = depth;
    double y = r.x;
    const IfsSystem back = unstable ? F.inverse() : F;
    for (int n = 0; n <= depth; ++n) {
        if (n > 0) {
            // f_omega^{-n} applies f_{omega_{-n}}^{-1} last; f_omega^n applies f_{omega_{n-1}} last.
            y = unstable ? back.map(w.at(-n))(y) : back.map(w.at(n - 1))(y);
        }
        level_witnesses(walk, dir, y, n, delta, r.witnesses);
    }
    std::vector<double> pts;
    pts.reserve(r.witnesses.size());
    for (const auto& lw : r.witnesses) pts.push_back(lw.point);
    r.fiber_projection = PointCloud(std::move(pts), delta);
    return r;
}

}  // namespace

LeafReport unstable_leaf_projection(const IfsSystem& F, const SymbolWindow& w, double x, int depth,
                                    double prune_delta) {
    return leaf_impl(F, w, x, depth, prune_delta, LeafReport::Kind::Unstable);
}

LeafReport stable_leaf_projection(const IfsSystem& F, const SymbolWindow& w, double x, int depth,
                                  double prune_delta) {
    return leaf_impl(F, w, x, depth, prune_delta, LeafReport::Kind::Stable);
}

PointCloud leaf_projection_bruteforce(const IfsSystem& F, const SymbolWindow& w, double x, int depth, double delta,
                                      LeafReport::Kind kind) {
    const bool unstable = kind == LeafReport::Kind::Unstable;
    const IfsSystem walk = unstable ? F : F.inverse();
    std::vector<double> all;
    for (int n = 0; n <= depth; ++n) {
        std::vector<double> level = {fiber_word(F, w, x, unstable ? -n : n)};
        for (int j = 0; j < n; ++j) {
            std::vector<double> next;
            for (double p : level)
                for (const CircleMap& f : walk.maps) next.push_back(f(p));
            level = std::move(next);
        }
        all.insert(all.end(), level.begin(), level.end());
    }
    return PointCloud(std::move(all), delta);
}

std::vector<int> replay_leaf(const IfsSystem& F, const LeafReport& r, double tol) {
    WordEvaluator ev(F);
    const bool unstable = r.kind == LeafReport::Kind::Unstable;
    std::vector<int> bad;
    for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
        const auto& w = r.witnesses[i];
        double y = fiber_word(F, r.window, r.x, unstable ? -w.n : w.n);
        double p = ev.apply(w.sigma, y);
        if (!(circ_dist(p, w.point) <= tol)) bad.push_back(int(i));
    }
    return bad;
}

json LeafDensityWitness::to_json() const {
    return {{"sigma", sigma.to_json()}, {"n", n}, {"m", m}, {"point", point}};
}

LeafDensityWitness leaf_density_certify(const IfsSystem& F, const AttractorReport& attractor, const SymbolWindow& w,
                                        double x, const Cylinder& target, const Arc& target_arc,
                                        double prune_delta) {
    if (!F.invertible()) throw NonInvertible("leaf density needs an invertible system");
    w.validate(int(F.k()));
    const Word alpha(target.neg_word);
    check_word(F, alpha);
    WordEvaluator ev(F);
    int m;
    if (attractor.verdict == Verdict::StrictAttractorEvidence && attractor.horizon_n0) {
        double inradius = alpha.empty() ? target_arc.length / 2 : word_preimage(ev, alpha, target_arc).length / 2;
        if (attractor.epsilon > inradius)
            throw InputError("attractor report epsilon " + std::to_string(attractor.epsilon) +
                             " exceeds the inradius " + std::to_string(inradius) + " of the pulled-back arc");
        m = *attractor.horizon_n0;
    } else {
        // Without a horizon the search runs to the report's budget; it can
        // only succeed by luck or exhaust.
        m = attractor.budget;
    }
    const int r = int(alpha.size());
    const int n = m + r;
    const double y = fiber_word(F, w, x, -n);
    BfsTree t;
    t.nodes.push_back({wrap(y), -1, 0, 0});
    std::vector<int> frontier = {0}, next;
    for (int level = 1; level <= m; ++level) {
        CellSet seen(prune_delta);
        next.clear();
        for (int p : frontier) {
            double z0 = t.nodes[std::size_t(p)].x;
            for (int s = 1; s <= int(F.k()); ++s) {
                double z = F.map(s)(z0);
                if (!seen.insert(z)) continue;
                t.nodes.push_back({z, p, s, level});
                next.push_back(int(t.nodes.size()) - 1);
            }
        }
        std::swap(frontier, next);
    }
    for (int idx : frontier) {
        double z = ev.apply(alpha, t.nodes[std::size_t(idx)].x);
        if (target_arc.contains_open(z)) {
            LeafDensityWitness out;
            out.sigma = t.word(idx, Direction::Forward).then(alpha);
            out.n = n;
            out.m = m;
            out.point = ev.apply(out.sigma, y);
            return out;
        }
    }
    throw SearchExhausted("no word of length " + std::to_string(m) + " reaches the target arc");
}

int SkewTransitivityReport::failures() const {
    return int(std::count_if(results.begin(), results.end(), [](const Result& r) { return !r.ok; }));
}

json SkewTransitivityReport::to_json() const {
    json rs = json::array();
    for (const auto& r : results) rs.push_back({{"ok", r.ok}, {"n", r.n}, {"reason", r.reason}});
    return {{"samples", results.size()}, {"failures", failures()}, {"results", rs}};
}

SkewTransitivityReport skew_transitivity_check(const IfsSystem& F, const DensityCertificate& cert,
                                               const std::vector<SkewSample>& samples) {
    if (cert.mode != DensityCertificate::Mode::Transitivity || !cert.complete())
        throw InputError("skew transitivity needs a complete transitivity certificate");
    if (!F.invertible()) throw NonInvertible("skew transitivity replay needs an invertible system");
    WordEvaluator ev(F);
    std::map<std::pair<int, int>, const DensityCertificate::Witness*> by_pair;
    for (const auto& w : cert.witnesses) by_pair.emplace(std::make_pair(w.source, w.ball), &w);
    SkewTransitivityReport rep;
    for (const SkewSample& s : samples) {
        SkewTransitivityReport::Result res;
        const Word fw(s.C.pos_word), gw(s.D.neg_word);
        double a = ev.apply(fw, s.U.start), b = ev.apply(fw, s.U.start + s.U.length);
        Arc fU(a, std::max(ccw(a, b), 1e-300));
        Arc gV = gw.empty() ? s.V : word_preimage(ev, gw, s.V);
        const DensityCertificate::Witness* hit = nullptr;
        for (int i = 0; i < cert.n_sources() && !hit; ++i) {
            if (!fU.contains_arc(cert.sources[std::size_t(i)])) continue;
            for (int j = 0; j < cert.n_balls && !hit; ++j) {
                if (!gV.contains_arc(cert.ball(j))) continue;
                auto it = by_pair.find({i, j});
                if (it != by_pair.end()) hit = it->second;
            }
        }
        if (!hit) {
            res.reason = "certificate has no source inside f(U) with a ball inside g^-1(V)";
            rep.results.push_back(res);
            continue;
        }
        const Word& h = hit->word;
        double u = fw.empty() ? hit->point : ev.apply(fw.inverse(), hit->point);
        std::vector<int> future = s.C.pos_word;
        future.insert(future.end(), h.symbols.begin(), h.symbols.end());
        future.insert(future.end(), s.D.neg_word.begin(), s.D.neg_word.end());
        future.insert(future.end(), s.D.pos_word.begin(), s.D.pos_word.end());
        SymbolWindow A(s.C.neg_word, future);
        res.n = long(s.C.pos_word.size() + h.size() + s.D.neg_word.size());
        auto [wn, y] = skew_step(F, A, u, res.n);
        if (!s.C.contains(A))
            res.reason = "constructed sequence leaves C";
        else if (!s.U.contains(u))
            res.reason = "sample point leaves U";
        else if (!s.D.contains(wn))
            res.reason = "shifted sequence misses D";
        else if (!s.V.contains(y))
            res.reason = "fiber point misses V";
        else
            res.ok = true;
        rep.results.push_back(res);
    }
    return rep;
}

}  // namespace ifs
