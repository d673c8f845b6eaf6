#include "ifs/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace ifs {

using nlohmann::json;

Word Word::inverse() const {
    Word w;
    w.symbols.assign(symbols.rbegin(), symbols.rend());
    w.direction = direction == Direction::Forward ? Direction::Backward : Direction::Forward;
    return w;
}

Word Word::then(const Word& next) const {
    if (empty()) return next;
    if (next.empty()) return *this;
    if (next.direction != direction) throw std::invalid_argument("cannot concatenate words of mixed direction");
    Word w = *this;
    w.symbols.insert(w.symbols.end(), next.symbols.begin(), next.symbols.end());
    return w;
}

std::string Word::str() const {
    std::ostringstream os;
    os << (direction == Direction::Forward ? "F[" : "B[");
    for (std::size_t i = 0; i < symbols.size(); ++i) os << (i ? "," : "") << symbols[i];
    os << "]";
    return os.str();
}

json Word::to_json() const {
    return {{"symbols", symbols}, {"direction", direction == Direction::Forward ? "forward" : "backward"}};
}

Word Word::from_json(const json& j) {
    Word w;
    w.symbols = j.at("symbols").get<std::vector<int>>();
    std::string d = j.value("direction", "forward");
    if (d == "forward")
        w.direction = Direction::Forward;
    else if (d == "backward")
        w.direction = Direction::Backward;
    else
        throw InputError("unknown word direction: " + d);
    return w;
}

void check_word(const IfsSystem& F, const Word& w) {
    for (int s : w.symbols)
        if (s < 1 || s > int(F.k())) throw std::out_of_range("word symbol out of range: " + std::to_string(s));
    if (w.direction == Direction::Backward && !F.invertible())
        throw NonInvertible("backward word over a non-invertible system");
}

CircleMap compose_word(const IfsSystem& F, const Word& w) {
    check_word(F, w);
    std::vector<CircleMap> ms;
    for (auto it = w.symbols.rbegin(); it != w.symbols.rend(); ++it) {
        const CircleMap& f = F.map(*it);
        if (w.direction == Direction::Forward)
            ms.push_back(f);
        else if (f.kind() == CircleMap::Kind::Rotation)
            ms.push_back(CircleMap::rotation(-f.angle()));
        else
            ms.push_back(CircleMap::inverse(f));
    }
    return CircleMap::compose(std::move(ms));
}

WordEvaluator::WordEvaluator(const IfsSystem& F) : F_(F) {
    if (F.invertible()) inv_ = F.inverse();
}

const IfsSystem& WordEvaluator::backward() const {
    if (!inv_) throw NonInvertible("backward word over a non-invertible system");
    return *inv_;
}

double WordEvaluator::apply(const Word& w, double x) const {
    const IfsSystem& S = w.direction == Direction::Forward ? F_ : backward();
    for (int s : w.symbols) x = S.map(s)(x);
    return x;
}

double WordEvaluator::derivative(const Word& w, double x) const {
    const IfsSystem& S = w.direction == Direction::Forward ? F_ : backward();
    double d = 1.0;
    for (int s : w.symbols) {
        const CircleMap& f = S.map(s);
        d *= f.dlift(x);
        x = f(x);
    }
    return d;
}

Word BfsTree::word(int idx, Direction d) const {
    Word w;
    w.direction = d;
    while (idx > 0) {
        w.symbols.push_back(nodes[std::size_t(idx)].symbol);
        idx = nodes[std::size_t(idx)].parent;
    }
    std::reverse(w.symbols.begin(), w.symbols.end());
    return w;
}

CellSet::CellSet(double delta) : delta_(delta) {
    double n = std::ceil(1.0 / delta);
    if (n <= double(1 << 24)) dense_.assign(std::size_t(n) + 1, 0);
}

bool CellSet::insert(double x) {
    long long c = (long long)std::floor(wrap(x) / delta_);
    if (!dense_.empty()) {
        std::size_t i = std::size_t(std::min<long long>(c, (long long)dense_.size() - 1));
        if (dense_[i]) return false;
        dense_[i] = 1;
        return true;
    }
    return sparse_.insert(c).second;
}

BfsTree bfs_explore(const IfsSystem& maps, double start, int depth, double prune_delta,
                    const std::function<bool(int, const BfsTree&)>& visit) {
    BfsTree t;
    t.nodes.push_back({wrap(start), -1, 0, 0});
    CellSet seen(prune_delta);
    std::vector<int> frontier = {0}, next;
    const int k = int(maps.k());
    for (int level = 1; level <= depth && !frontier.empty(); ++level) {
        next.clear();
        for (int p : frontier) {
            double x = t.nodes[std::size_t(p)].x;
            for (int s = 1; s <= k; ++s) {
                double y = maps.map(s)(x);
                if (!seen.insert(y)) continue;
                t.nodes.push_back({y, p, s, level});
                int idx = int(t.nodes.size()) - 1;
                next.push_back(idx);
                if (visit(idx, t)) return t;
            }
        }
        std::swap(frontier, next);
    }
    return t;
}

PointCloud orbit_bfs(const IfsSystem& F, const PointCloud& start, int depth, double prune_delta) {
    if (depth < 1) throw std::invalid_argument("orbit_bfs depth must be >= 1");
    CellSet seen(prune_delta);
    std::vector<double> frontier = start.points(), next, all;
    for (int level = 1; level <= depth && !frontier.empty(); ++level) {
        next.clear();
        for (double x : frontier)
            for (const CircleMap& f : F.maps) {
                double y = f(x);
                if (seen.insert(y)) next.push_back(y);
            }
        all.insert(all.end(), next.begin(), next.end());
        std::swap(frontier, next);
    }
    if (all.empty()) all = start.points();
    return PointCloud(std::move(all), prune_delta);
}

int DensityCertificate::balls_for(double epsilon) { return int(std::ceil(2.0 / epsilon - 1e-12)); }

Arc DensityCertificate::ball(int j) const { return Arc::ball(double(j) / n_balls, epsilon / 2.0); }

namespace {

bool in_ball(const DensityCertificate& c, int j, double y) {
    return circ_dist(y, double(j) / c.n_balls) < c.epsilon / 2.0;
}

// Balls of the certificate's cover that contain y.
template <class F>
void for_balls(const DensityCertificate& c, double y, F&& fn) {
    const int N = c.n_balls;
    const double r = c.epsilon / 2.0;
    int lo = int(std::floor((y - r) * N)) - 1, hi = int(std::ceil((y + r) * N)) + 1;
    if (hi - lo >= N) {
        lo = 0;
        hi = N - 1;
    }
    for (int j = lo; j <= hi; ++j) {
        int jj = ((j % N) + N) % N;
        if (circ_dist(y, double(jj) / N) < r) fn(jj);
    }
}

json dir_json(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

}  // namespace

json DensityCertificate::to_json() const {
    json ws = json::array();
    for (const auto& w : witnesses)
        ws.push_back({{"source", w.source}, {"ball", w.ball}, {"point", w.point}, {"word", w.word.to_json()}});
    json src = json::array();
    for (const Arc& a : sources) src.push_back(arc_json(a));
    json un = json::array();
    for (auto [s, b] : uncovered) un.push_back({s, b});
    return {{"mode", mode == Mode::Minimality ? "minimality" : "transitivity"},
            {"direction", dir_json(direction)},
            {"epsilon", epsilon},
            {"n_balls", n_balls},
            {"grid", grid},
            {"sources", src},
            {"witnesses", ws},
            {"uncovered", un},
            {"complete", complete()}};
}

DensityCertificate DensityCertificate::from_json(const json& j) {
    DensityCertificate c;
    c.mode = j.at("mode").get<std::string>() == "minimality" ? Mode::Minimality : Mode::Transitivity;
    c.direction = j.value("direction", "forward") == "forward" ? Direction::Forward : Direction::Backward;
    c.epsilon = j.at("epsilon").get<double>();
    c.n_balls = j.at("n_balls").get<int>();
    c.grid = j.value("grid", std::vector<double>{});
    for (const auto& a : j.value("sources", json::array()))
        c.sources.emplace_back(a.at("start").get<double>(), a.at("length").get<double>());
    for (const auto& w : j.at("witnesses"))
        c.witnesses.push_back({w.at("source").get<int>(), w.at("ball").get<int>(), w.at("point").get<double>(),
                               Word::from_json(w.at("word"))});
    for (const auto& u : j.value("uncovered", json::array())) c.uncovered.emplace_back(u.at(0), u.at(1));
    return c;
}

ReplayResult replay(const IfsSystem& F, const DensityCertificate& cert) {
    ReplayResult r;
    WordEvaluator ev(F);
    for (std::size_t i = 0; i < cert.witnesses.size(); ++i) {
        const auto& w = cert.witnesses[i];
        ++r.checked;
        bool ok = w.ball >= 0 && w.ball < cert.n_balls && w.source >= 0 && w.source < cert.n_sources();
        if (ok) {
            try {
                check_word(F, w.word);
                if (w.word.empty()) ok = false;
                if (cert.mode == DensityCertificate::Mode::Minimality)
                    ok = ok && w.point == cert.grid[std::size_t(w.source)];
                else
                    ok = ok && cert.sources[std::size_t(w.source)].contains(w.point);
                ok = ok && in_ball(cert, w.ball, ev.apply(w.word, w.point));
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok) r.failures.push_back(int(i));
    }
    return r;
}

DirectCheck direct_density_check(const IfsSystem& F, const DensityCertificate& cert, double net_delta) {
    DirectCheck out;
    WordEvaluator ev(F);
    const PointCloud net = PointCloud::full_net(net_delta);
    std::vector<std::vector<double>> landing(std::size_t(cert.n_sources()));
    for (const auto& w : cert.witnesses) landing[std::size_t(w.source)].push_back(ev.apply(w.word, w.point));
    out.ok = cert.n_sources() > 0;
    for (auto& l : landing) {
        if (l.empty()) {
            out.ok = false;
            out.worst_gap_distance = 1.0;
            continue;
        }
        PointCloud c(l, 1e-15);
        double d = directed_distance(net, c) + net_delta / 2.0;
        out.worst_gap_distance = std::max(out.worst_gap_distance, d);
    }
    out.ok = out.ok && out.worst_gap_distance <= cert.epsilon;
    return out;
}

namespace {

// Witnesses from one start point for every still-missing ball; fills `found`
// with (ball, word) in ball order.
void search_balls(const IfsSystem& walk, Direction dir, const DensityCertificate& c, double start, int depth,
                  double prune_delta, std::vector<int>& missing_mask, std::vector<std::pair<int, Word>>& found) {
    int remaining = 0;
    for (int m : missing_mask) remaining += m;
    if (remaining == 0) return;
    std::vector<int> hit(std::size_t(c.n_balls), -1);
    BfsTree tree = bfs_explore(walk, start, depth, prune_delta, [&](int idx, const BfsTree& t) {
        double y = t.nodes[std::size_t(idx)].x;
        for_balls(c, y, [&](int j) {
            if (missing_mask[std::size_t(j)] && hit[std::size_t(j)] < 0) {
                hit[std::size_t(j)] = idx;
                --remaining;
            }
        });
        return remaining == 0;
    });
    for (int j = 0; j < c.n_balls; ++j) {
        if (hit[std::size_t(j)] >= 0) {
            found.emplace_back(j, tree.word(hit[std::size_t(j)], dir));
            missing_mask[std::size_t(j)] = 0;
        }
    }
}

}  // namespace

DensityCertificate certify_minimality(const IfsSystem& F, double epsilon, int grid_size, int depth_budget,
                                      Direction dir, double prune_delta, Exec exec) {
    if (!(epsilon > 2.0 * prune_delta)) throw InputError("certify_minimality needs epsilon > 2*prune_delta");
    if (grid_size < 1 || depth_budget < 1) throw InputError("grid_size and depth_budget must be positive");
    DensityCertificate c;
    c.mode = DensityCertificate::Mode::Minimality;
    c.direction = dir;
    c.epsilon = epsilon;
    c.n_balls = DensityCertificate::balls_for(epsilon);
    c.grid = seed_grid(grid_size);
    const IfsSystem walk = dir == Direction::Forward ? F : F.inverse();
    std::vector<std::vector<std::pair<int, Word>>> per_seed{std::size_t(grid_size)};
    parallel_for(grid_size, exec, [&](std::ptrdiff_t s) {
        std::vector<int> mask(std::size_t(c.n_balls), 1);
        search_balls(walk, dir, c, c.grid[std::size_t(s)], depth_budget, prune_delta, mask,
                     per_seed[std::size_t(s)]);
    });
    for (int s = 0; s < grid_size; ++s) {
        std::vector<int> have(std::size_t(c.n_balls), 0);
        for (auto& [j, w] : per_seed[std::size_t(s)]) {
            c.witnesses.push_back({s, j, c.grid[std::size_t(s)], w});
            have[std::size_t(j)] = 1;
        }
        for (int j = 0; j < c.n_balls; ++j)
            if (!have[std::size_t(j)]) c.uncovered.emplace_back(s, j);
    }
    if (!c.uncovered.empty())
        throw CertificateIncomplete("minimality search exhausted with " + std::to_string(c.uncovered.size()) +
                                        " uncovered (seed, ball) pairs",
                                    c);
    return c;
}

DensityCertificate certify_transitivity(const IfsSystem& F, double epsilon, int arc_cover_size, int depth_budget,
                                        double prune_delta, Exec exec) {
    if (!(epsilon > 2.0 * prune_delta)) throw InputError("certify_transitivity needs epsilon > 2*prune_delta");
    if (arc_cover_size < 1 || depth_budget < 1) throw InputError("arc_cover_size and depth_budget must be positive");
    DensityCertificate c;
    c.mode = DensityCertificate::Mode::Transitivity;
    c.epsilon = epsilon;
    c.n_balls = DensityCertificate::balls_for(epsilon);
    for (int i = 0; i < arc_cover_size; ++i) c.sources.emplace_back(double(i) / arc_cover_size, 1.0 / arc_cover_size);
    std::vector<std::vector<DensityCertificate::Witness>> per{std::size_t(arc_cover_size)};
    parallel_for(arc_cover_size, exec, [&](std::ptrdiff_t i) {
        const Arc& A = c.sources[std::size_t(i)];
        std::vector<int> mask(std::size_t(c.n_balls), 1);
        for (double t : {0.5, 0.25, 0.75, 0.125, 0.875}) {
            std::vector<std::pair<int, Word>> found;
            double p = A.at(t);
            search_balls(F, Direction::Forward, c, p, depth_budget, prune_delta, mask, found);
            for (auto& [j, w] : found) per[std::size_t(i)].push_back({int(i), j, p, w});
        }
        std::sort(per[std::size_t(i)].begin(), per[std::size_t(i)].end(),
                  [](const auto& a, const auto& b) { return a.ball < b.ball; });
    });
    for (int i = 0; i < arc_cover_size; ++i) {
        std::vector<int> have(std::size_t(c.n_balls), 0);
        for (auto& w : per[std::size_t(i)]) {
            c.witnesses.push_back(w);
            have[std::size_t(w.ball)] = 1;
        }
        for (int j = 0; j < c.n_balls; ++j)
            if (!have[std::size_t(j)]) c.uncovered.emplace_back(i, j);
    }
    if (!c.uncovered.empty())
        throw CertificateIncomplete("transitivity search exhausted with " + std::to_string(c.uncovered.size()) +
                                        " uncovered (arc, ball) pairs",
                                    c);
    return c;
}

DensityCertificate transitivity_from_minimality(const DensityCertificate& m, int arc_cover_size) {
    if (m.mode != DensityCertificate::Mode::Minimality || !m.complete())
        throw std::invalid_argument("need a complete minimality certificate");
    DensityCertificate c;
    c.mode = DensityCertificate::Mode::Transitivity;
    c.direction = m.direction;
    c.epsilon = m.epsilon;
    c.n_balls = m.n_balls;
    for (int i = 0; i < arc_cover_size; ++i) c.sources.emplace_back(double(i) / arc_cover_size, 1.0 / arc_cover_size);
    for (int i = 0; i < arc_cover_size; ++i) {
        int seed = -1;
        for (std::size_t s = 0; s < m.grid.size(); ++s)
            if (c.sources[std::size_t(i)].contains(m.grid[s])) {
                seed = int(s);
                break;
            }
        if (seed < 0) throw std::invalid_argument("source arc contains no seed of the minimality grid");
        for (const auto& w : m.witnesses)
            if (w.source == seed) c.witnesses.push_back({i, w.ball, w.point, w.word});
    }
    return c;
}

json ExpandingCover::to_json() const {
    json bs = json::array(), ws = json::array();
    for (const Arc& a : balls) bs.push_back(arc_json(a));
    for (const Word& w : words) ws.push_back(w.to_json());
    return {{"balls", bs}, {"words", ws}, {"kappa", kappa}, {"margin_epsilon", margin_epsilon}, {"safety", safety}};
}

ExpandingCover ExpandingCover::from_json(const json& j) {
    ExpandingCover c;
    for (const auto& a : j.at("balls")) c.balls.emplace_back(a.at("start").get<double>(), a.at("length").get<double>());
    for (const auto& w : j.at("words")) c.words.push_back(Word::from_json(w));
    c.kappa = j.at("kappa").get<double>();
    c.margin_epsilon = j.at("margin_epsilon").get<double>();
    c.safety = j.value("safety", 1.1);
    return c;
}

Arc word_preimage(const WordEvaluator& ev, const Word& w, const Arc& a) {
    Word inv = w.inverse();
    double s = ev.apply(inv, a.start);
    double e = ev.apply(inv, a.start + a.length);
    double len = ccw(s, e);
    if (len <= 0.0) len = 1.0;
    return Arc(s, len);
}

namespace {

double sup_derivative(const WordEvaluator& ev, const Word& w, const Arc& a, int grid) {
    double sup = 0.0;
    for (int i = 0; i <= grid; ++i) sup = std::max(sup, ev.derivative(w, a.at(double(i) / grid)));
    return sup;
}

}  // namespace

CoverCheck verify_expanding_cover(const IfsSystem& F, const ExpandingCover& cover, double kappa_required, int grid) {
    CoverCheck r;
    if (cover.balls.size() != cover.words.size() || cover.balls.empty()) return r;
    WordEvaluator ev(F);
    r.achieved_kappa = 1e300;
    for (std::size_t i = 0; i < cover.balls.size(); ++i) {
        Arc pre = word_preimage(ev, cover.words[i], cover.balls[i]);
        Arc nb(pre.start - cover.margin_epsilon, std::min(1.0, pre.length + 2.0 * cover.margin_epsilon));
        double sup = sup_derivative(ev, cover.words[i], nb, grid);
        double k = 1.0 / (cover.safety * sup);
        if (k < r.achieved_kappa) r.achieved_kappa = k;
        if (k < kappa_required && r.failing_ball < 0) r.failing_ball = int(i);
    }
    r.covers = ArcUnion(cover.balls).full();
    r.ok = r.covers && r.failing_ball < 0 && kappa_required > 1.0;
    return r;
}

ExpandingCover search_expanding_cover(const IfsSystem& F, double kappa, int word_depth, int grid_size,
                                      ExpandingSearchOptions opt) {
    if (!(kappa > 1.0)) throw InputError("kappa must exceed 1");
    if (!F.invertible()) throw NonInvertible("expanding cover search needs an invertible system");
    ExpandingCover cover;
    cover.kappa = kappa;
    cover.margin_epsilon = opt.margin_epsilon;
    cover.safety = opt.safety;
    // Words h act in `dir`; we walk h^-1 from each uncovered grid point and
    // track how much h^-1 expands there.
    const IfsSystem hs = opt.direction == Direction::Forward ? F : F.inverse();
    const IfsSystem walk = hs.inverse();
    WordEvaluator ev(F);
    const Direction walk_dir = opt.direction == Direction::Forward ? Direction::Backward : Direction::Forward;
    std::vector<double> grid = seed_grid(grid_size);
    std::vector<char> covered(grid.size(), 0);
    const double need = kappa * opt.safety;
    const std::vector<double> radii = {0.12, 0.09, 0.07, 0.055, 0.045, 0.037, 0.031, 0.026};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (covered[g]) continue;
        const double x = grid[g];
        std::vector<double> expansion(1, 1.0);
        bool placed = false;
        bfs_explore(walk, x, word_depth, kDefaultDelta, [&](int idx, const BfsTree& t) {
            const auto& nd = t.nodes[std::size_t(idx)];
            double parent_x = t.nodes[std::size_t(nd.parent)].x;
            double e = expansion[std::size_t(nd.parent)] * walk.map(nd.symbol).dlift(parent_x);
            expansion.push_back(e);
            if (e < 1.5 * need) return false;
            Word h = t.word(idx, walk_dir).inverse();
            for (double r : radii) {
                if (r < opt.lebesgue) break;
                Arc ball = Arc::ball(x, r);
                Arc pre = word_preimage(ev, h, ball);
                Arc nb(pre.start - opt.margin_epsilon, std::min(1.0, pre.length + 2.0 * opt.margin_epsilon));
                if (nb.full()) continue;
                if (sup_derivative(ev, h, nb, opt.check_grid) * need >= 1.0) continue;
                cover.balls.push_back(ball);
                cover.words.push_back(h);
                for (std::size_t q = 0; q < grid.size(); ++q)
                    if (ball.depth(grid[q]) >= opt.lebesgue) covered[q] = 1;
                placed = true;
                return true;
            }
            return false;
        });
        (void)placed;
    }
    std::vector<double> uncovered;
    for (std::size_t q = 0; q < grid.size(); ++q)
        if (!covered[q]) uncovered.push_back(grid[q]);
    if (!uncovered.empty() || !ArcUnion(cover.balls).full())
        throw NotFound("no expanding cover found for " + std::to_string(uncovered.size()) + " grid points",
                       uncovered);
    return cover;
}

DensityCertificate bootstrap_density(const IfsSystem& F, const ExpandingCover& cover, const DensityCertificate& cert,
                                     int rounds, int fallback_depth) {
    if (!(cover.kappa > 1.0)) throw InputError("expanding cover must have kappa > 1");
    if (rounds < 0) throw InputError("rounds must be >= 0");
    if (rounds == 0) return cert;
    if (cert.mode != DensityCertificate::Mode::Minimality || !cert.complete())
        throw InputError("bootstrap needs a complete minimality certificate");
    for (const Word& w : cover.words)
        if (!w.empty() && w.direction != cert.direction)
            throw InputError("cover words and certificate witnesses point in different directions");
    WordEvaluator ev(F);
    const IfsSystem walk = cert.direction == Direction::Forward ? F : F.inverse();
    DensityCertificate cur = cert;
    for (int round = 0; round < rounds; ++round) {
        DensityCertificate nxt;
        nxt.mode = cur.mode;
        nxt.direction = cur.direction;
        nxt.epsilon = cur.epsilon / cover.kappa;
        nxt.n_balls = DensityCertificate::balls_for(nxt.epsilon);
        nxt.grid = cur.grid;
        // Which cover ball serves each new target ball, and its pullback.
        std::vector<std::vector<std::pair<int, Arc>>> serve(std::size_t(nxt.n_balls));
        for (int j = 0; j < nxt.n_balls; ++j) {
            Arc target = nxt.ball(j);
            for (std::size_t i = 0; i < cover.balls.size(); ++i)
                if (cover.balls[i].contains_arc(target))
                    serve[std::size_t(j)].emplace_back(int(i), word_preimage(ev, cover.words[i], target));
            if (serve[std::size_t(j)].empty())
                throw CoverMismatch("target ball " + std::to_string(j) + " fits in no cover ball");
        }
        for (std::size_t s = 0; s < cur.grid.size(); ++s) {
            std::vector<std::pair<double, const Word*>> land;
            for (const auto& w : cur.witnesses)
                if (w.source == int(s)) land.emplace_back(ev.apply(w.word, w.point), &w.word);
            for (int j = 0; j < nxt.n_balls; ++j) {
                std::optional<Word> found;
                for (const auto& [i, pre] : serve[std::size_t(j)]) {
                    const Word* best = nullptr;
                    double bd = 0.0;
                    for (const auto& [q, w] : land) {
                        double d = pre.depth(q);
                        if (d > bd) {
                            bd = d;
                            best = w;
                        }
                    }
                    if (best) {
                        Word cand = best->then(cover.words[std::size_t(i)]);
                        if (in_ball(nxt, j, ev.apply(cand, cur.grid[s]))) {
                            found = cand;
                            break;
                        }
                    }
                }
                if (!found) {
                    // No stored landing point in the pullback: search for one
                    // directly, then finish with the cover word.
                    for (const auto& [i, pre] : serve[std::size_t(j)]) {
                        int hit = -1;
                        BfsTree t = bfs_explore(walk, cur.grid[s], fallback_depth, kDefaultDelta / 4,
                                                [&](int idx, const BfsTree& tr) {
                                                    if (pre.contains_open(tr.nodes[std::size_t(idx)].x)) {
                                                        hit = idx;
                                                        return true;
                                                    }
                                                    return false;
                                                });
                        if (hit < 0) continue;
                        Word cand = t.word(hit, cur.direction).then(cover.words[std::size_t(i)]);
                        if (in_ball(nxt, j, ev.apply(cand, cur.grid[s]))) {
                            found = cand;
                            break;
                        }
                    }
                }
                if (!found) {
                    nxt.uncovered.emplace_back(int(s), j);
                    continue;
                }
                nxt.witnesses.push_back({int(s), j, cur.grid[s], *found});
            }
        }
        if (!nxt.uncovered.empty())
            throw CertificateIncomplete("bootstrap round " + std::to_string(round + 1) + " left " +
                                            std::to_string(nxt.uncovered.size()) + " pairs uncovered",
                                        nxt);
        if (!replay(F, nxt).ok()) throw Error("bootstrapped certificate failed replay");
        cur = std::move(nxt);
    }
    return cur;
}

json BlendingCertificate::to_json() const {
    json ws = json::array();
    for (const Word& w : words) ws.push_back(w.to_json());
    return {{"region_B", arc_json(region_B)},
            {"domain_D", arc_json(domain_D)},
            {"words", ws},
            {"contraction_beta", contraction_beta},
            {"cover_slack", cover_slack}};
}

BlendingCertificate BlendingCertificate::from_json(const json& j) {
    BlendingCertificate b;
    b.region_B = Arc(j.at("region_B").at("start").get<double>(), j.at("region_B").at("length").get<double>());
    b.domain_D = Arc(j.at("domain_D").at("start").get<double>(), j.at("domain_D").at("length").get<double>());
    for (const auto& w : j.at("words")) b.words.push_back(Word::from_json(w));
    b.contraction_beta = j.at("contraction_beta").get<double>();
    b.cover_slack = j.at("cover_slack").get<double>();
    return b;
}

BlendingCertificate verify_blending(const IfsSystem& F, const Arc& B, const Arc& D, const std::vector<Word>& words,
                                    int grid) {
    if (!D.contains_arc(B)) throw InputError("closure(B) must lie in closure(D)");
    if (words.empty()) throw InputError("no blending words");
    WordEvaluator ev(F);
    for (const Word& w : words) check_word(F, w);
    BlendingCertificate c;
    c.region_B = B;
    c.domain_D = D;
    c.words = words;
    // Contraction on closure(D) and invariance of closure(D).
    double beta = 0.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        double a = ev.apply(words[i], D.start), b = ev.apply(words[i], D.start + D.length);
        const double tol = 1e-12;
        auto in_d = [&](double y) { return D.depth(y) > 0.0 || circ_dist(y, D.start) <= tol || circ_dist(y, D.end()) <= tol; };
        bool inside = in_d(a) && in_d(b) && ccw(a, b) <= D.length + tol;
        if (!inside) throw NotContracting("word " + words[i].str() + " does not map closure(D) into itself", int(i), a);
        for (int g = 0; g <= grid; ++g) {
            double x = D.at(double(g) / grid);
            double d = ev.derivative(words[i], x);
            beta = std::max(beta, d);
            if (!(d * 1.1 < 1.0))
                throw NotContracting("word " + words[i].str() + " is not a contraction on D", int(i), x);
        }
    }
    c.contraction_beta = beta;
    // Cover of closure(B) by the images, with slack measured in the images.
    std::vector<Arc> images;
    for (const Word& w : words) {
        double a = ev.apply(w, B.start), b = ev.apply(w, B.start + B.length);
        images.emplace_back(a, std::max(ccw(a, b), 1e-300));
    }
    double slack = 1.0;
    for (int g = 0; g <= grid; ++g) {
        double y = B.at(double(g) / grid);
        double best = 0.0;
        for (const Arc& im : images) best = std::max(best, im.depth(y));
        if (!(best > 0.0)) throw CoverFails("closure(B) point not covered by any image", y);
        slack = std::min(slack, best);
    }
    c.cover_slack = slack;
    return c;
}

json GlobalizationReport::to_json() const {
    return {{"forward_uncovered", forward_uncovered}, {"backward_uncovered", backward_uncovered}, {"ok", ok()}};
}

GlobalizationReport verify_globalization(const IfsSystem& F, const Arc& B, const std::vector<Word>& fw,
                                         const std::vector<Word>& bw, int grid) {
    if (!F.invertible()) throw NonInvertible("globalization check needs an invertible system");
    WordEvaluator ev(F);
    GlobalizationReport r;
    for (int g = 0; g < grid; ++g) {
        double y = double(g) / grid;
        bool f = false, b = false;
        for (const Word& w : fw)
            if (B.contains_open(ev.apply(w.inverse(), y))) {
                f = true;
                break;
            }
        for (const Word& w : bw)
            if (B.contains_open(ev.apply(w, y))) {
                b = true;
                break;
            }
        if (!f) r.forward_uncovered.push_back(y);
        if (!b) r.backward_uncovered.push_back(y);
    }
    return r;
}

Word target_word_search(const IfsSystem& F, const BlendingCertificate& blend, double x, double tol) {
    const Arc& B = blend.region_B;
    if (!B.contains(x)) throw InputError("target must lie in the blending region");
    if (!(tol > 0)) throw InputError("tol must be positive");
    WordEvaluator ev(F);
    std::vector<Word> inv;
    for (const Word& w : blend.words) inv.push_back(w.inverse());
    std::vector<int> chosen;
    double y = x;
    auto compose_chosen = [&]() {
        Word out;
        for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) out = out.then(blend.words[std::size_t(*it)]);
        return out;
    };
    auto image_length = [&](const Word& w) {
        if (w.empty()) return B.length;
        return ccw(ev.apply(w, B.start), ev.apply(w, B.start + B.length));
    };
    Word word;
    while (image_length(word) >= tol) {
        int best = -1;
        double bd = 0.0, by = 0.0;
        for (std::size_t i = 0; i < inv.size(); ++i) {
            double z = ev.apply(inv[i], y);
            double d = B.depth(z);
            if (d > bd) {
                bd = d;
                best = int(i);
                by = z;
            }
        }
        if (best < 0) throw NoBranch("no blending image contains the current point", y);
        chosen.push_back(best);
        y = by;
        word = compose_chosen();
        if (chosen.size() > 4096) throw NoBranch("images are not shrinking", y);
    }
    double landed = word.empty() ? B.mid() : ev.apply(word, B.mid());
    if (!(circ_dist(landed, x) < tol)) throw NoBranch("replay of the found word missed the target", landed);
    return word;
}

CircleMap perturbation(double magnitude, Rng rng, PerturbationBound* bound) {
    if (!(magnitude >= 0.0 && magnitude < 0.01)) throw InputError("perturbation magnitude must lie in [0, 0.01)");
    if (magnitude == 0.0) {
        if (bound) *bound = {};
        return CircleMap();
    }
    const int n = 6;
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[std::size_t(i)] = rng.uniform(-0.25, 0.25);
        v[std::size_t(i)] = rng.uniform(-1.0, 1.0);
    }
    std::vector<Knot> ks;
    for (int i = 0; i <= n; ++i) {
        int j = i % n;
        double x = double(i) / n;
        ks.push_back({Real(x), Real(x + magnitude * u[std::size_t(j)]), Real(1.0 + magnitude * v[std::size_t(j)])});
    }
    CircleMap P = CircleMap::hermite(ks, 1);
    PerturbationBound b;
    for (int i = 0; i <= 6000; ++i) {
        double x = i / 6000.0;
        b.sup = std::max(b.sup, std::fabs(P.lift(x) - x));
        b.dsup = std::max(b.dsup, std::fabs(P.dlift(x) - 1.0));
    }
    if (b.sup > magnitude || b.dsup > 10.0 * magnitude) throw Error("perturbation exceeded its bounds");
    if (bound) *bound = b;
    return P;
}

IfsSystem perturb_system(const IfsSystem& F, double magnitude, std::uint64_t seed) {
    Rng root(seed);
    std::vector<CircleMap> ms;
    for (std::size_t i = 0; i < F.k(); ++i) {
        CircleMap P = perturbation(magnitude, root.split(i));
        ms.push_back(P.is_identity() ? F.maps[i] : CircleMap::compose({P, F.maps[i]}));
    }
    return IfsSystem(std::move(ms), F.label.empty() ? "" : F.label + "~");
}

bool check_absorbing_domain(const IfsSystem& F, const ArcUnion& U) {
    if (U.empty() || U.full()) throw InputError("absorbing-domain check needs a proper nonempty interval-domain");
    if (!F.invertible()) throw NonInvertible("absorbing-domain check expects homeomorphisms");
    const double margin = 1e-12;
    for (const CircleMap& f : F.maps) {
        for (const Arc& a : U.arcs()) {
            double s = f(a.start), e = f(a.start + a.length);
            Arc img(s, std::max(ccw(s, e), 1e-300));
            bool ok = false;
            for (const Arc& b : U.arcs()) {
                if (b.depth(s) > margin && b.depth(e) > margin && b.contains_arc(img)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) return false;
        }
    }
    return true;
}

}  // namespace ifs
