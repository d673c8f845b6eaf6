#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "ifs/errors.hpp"
#include "ifs/hyperspace.hpp"
#include "ifs/rng.hpp"

namespace ifs {

enum class Direction { Forward, Backward };

// Symbols are applied in list order: a forward word [s1..sn] is
// f_sn o ... o f_s1, a backward word is f_sn^-1 o ... o f_s1^-1.
struct Word {
    std::vector<int> symbols;
    Direction direction = Direction::Forward;

    Word() = default;
    Word(std::vector<int> s, Direction d = Direction::Forward) : symbols(std::move(s)), direction(d) {}

    bool empty() const { return symbols.empty(); }
    std::size_t size() const { return symbols.size(); }
    Word inverse() const;
    Word then(const Word& next) const;  // apply *this, then next
    std::string str() const;

    bool operator==(const Word& o) const = default;

    nlohmann::json to_json() const;
    static Word from_json(const nlohmann::json& j);
};

void check_word(const IfsSystem& F, const Word& w);
CircleMap compose_word(const IfsSystem& F, const Word& w);

// Evaluates a word step by step. Backward words need an invertible system.
class WordEvaluator {
public:
    explicit WordEvaluator(const IfsSystem& F);
    double apply(const Word& w, double x) const;
    double derivative(const Word& w, double x) const;
    const IfsSystem& forward() const { return F_; }
    const IfsSystem& backward() const;

private:
    const IfsSystem& F_;
    std::optional<IfsSystem> inv_;
};

// Preimage of an arc under a word, from the images of its endpoints.
Arc word_preimage(const WordEvaluator& ev, const Word& w, const Arc& a);

// Length-then-lexicographic exploration of words with delta-cell pruning.
// The visitor sees each surviving node once; returning true stops the search.
struct BfsTree {
    struct Node {
        double x;
        int parent;
        int symbol;
        int depth;
    };
    std::vector<Node> nodes;
    Word word(int idx, Direction d) const;
};

// Delta-cell membership used to prune breadth-first searches.
class CellSet {
public:
    explicit CellSet(double delta);
    bool insert(double x);  // true when the cell was not seen before

private:
    double delta_;
    std::vector<unsigned char> dense_;
    std::unordered_set<long long> sparse_;
};

BfsTree bfs_explore(const IfsSystem& maps, double start, int depth, double prune_delta,
                    const std::function<bool(int, const BfsTree&)>& visit);

PointCloud orbit_bfs(const IfsSystem& F, const PointCloud& start, int depth, double prune_delta);

struct DensityCertificate {
    enum class Mode { Minimality, Transitivity };
    struct Witness {
        int source = 0;
        int ball = 0;
        double point = 0.0;
        Word word;
    };

    Mode mode = Mode::Minimality;
    Direction direction = Direction::Forward;
    double epsilon = 0.0;
    int n_balls = 0;
    std::vector<double> grid;   // seeds (minimality)
    std::vector<Arc> sources;   // source arcs (transitivity)
    std::vector<Witness> witnesses;
    std::vector<std::pair<int, int>> uncovered;

    int n_sources() const { return mode == Mode::Minimality ? int(grid.size()) : int(sources.size()); }
    bool complete() const { return uncovered.empty() && int(witnesses.size()) == n_sources() * n_balls; }
    Arc ball(int j) const;
    static int balls_for(double epsilon);

    nlohmann::json to_json() const;
    static DensityCertificate from_json(const nlohmann::json& j);
};

struct CertificateIncomplete : BudgetExhausted {
    DensityCertificate partial_certificate;
    CertificateIncomplete(const std::string& what, DensityCertificate c)
        : BudgetExhausted(what), partial_certificate(std::move(c)) {}
};

struct ReplayResult {
    int checked = 0;
    std::vector<int> failures;  // witness indices
    bool ok() const { return failures.empty() && checked > 0; }
};

ReplayResult replay(const IfsSystem& F, const DensityCertificate& cert);

// Landing points of each source, checked for epsilon-density on a fine net
// without looking at the ball bookkeeping.
struct DirectCheck {
    double worst_gap_distance = 0.0;  // max over sources of net-to-landing distance
    bool ok = false;
};
DirectCheck direct_density_check(const IfsSystem& F, const DensityCertificate& cert, double net_delta = 1.0 / 8192);

DensityCertificate certify_minimality(const IfsSystem& F, double epsilon, int grid_size, int depth_budget,
                                      Direction dir = Direction::Forward, double prune_delta = kDefaultDelta,
                                      Exec exec = Exec::Parallel);

DensityCertificate certify_transitivity(const IfsSystem& F, double epsilon, int arc_cover_size, int depth_budget,
                                        double prune_delta = kDefaultDelta, Exec exec = Exec::Parallel);

// A minimal system is transitive: reuse seed witnesses for source arcs that
// contain a seed.
DensityCertificate transitivity_from_minimality(const DensityCertificate& cert, int arc_cover_size);

struct ExpandingCover {
    std::vector<Arc> balls;
    std::vector<Word> words;
    double kappa = 2.0;
    double margin_epsilon = 0.005;
    double safety = 1.1;

    nlohmann::json to_json() const;
    static ExpandingCover from_json(const nlohmann::json& j);
};

struct CoverCheck {
    bool ok = false;
    bool covers = false;
    double achieved_kappa = 0.0;  // min over balls of 1/(safety * sup Dh)
    int failing_ball = -1;
};

CoverCheck verify_expanding_cover(const IfsSystem& F, const ExpandingCover& cover, double kappa_required,
                                  int grid = 512);

struct ExpandingSearchOptions {
    Direction direction = Direction::Forward;
    double margin_epsilon = 0.005;
    double lebesgue = 0.025;  // every grid point sits this deep in some ball
    int check_grid = 512;
    double safety = 1.1;
};

ExpandingCover search_expanding_cover(const IfsSystem& F, double kappa, int word_depth, int grid_size,
                                      ExpandingSearchOptions opt = {});

DensityCertificate bootstrap_density(const IfsSystem& F, const ExpandingCover& cover, const DensityCertificate& cert,
                                     int rounds, int fallback_depth = 64);

struct BlendingCertificate {
    Arc region_B;
    Arc domain_D;
    std::vector<Word> words;
    double contraction_beta = 1.0;
    double cover_slack = 0.0;

    nlohmann::json to_json() const;
    static BlendingCertificate from_json(const nlohmann::json& j);
};

BlendingCertificate verify_blending(const IfsSystem& F, const Arc& B, const Arc& D, const std::vector<Word>& words,
                                    int grid = 1024);

struct GlobalizationReport {
    std::vector<double> forward_uncovered;
    std::vector<double> backward_uncovered;
    bool ok() const { return forward_uncovered.empty() && backward_uncovered.empty(); }
    nlohmann::json to_json() const;
};

GlobalizationReport verify_globalization(const IfsSystem& F, const Arc& B, const std::vector<Word>& forward_words,
                                         const std::vector<Word>& backward_words, int grid = 2048);

Word target_word_search(const IfsSystem& F, const BlendingCertificate& blend, double target_x, double tol);

struct PerturbationBound {
    double sup = 0.0;
    double dsup = 0.0;
};

// Hermite perturbation of the identity with |P - id| <= magnitude and
// |P' - 1| <= 10 magnitude.
CircleMap perturbation(double magnitude, Rng rng, PerturbationBound* bound = nullptr);
IfsSystem perturb_system(const IfsSystem& F, double magnitude, std::uint64_t seed);

bool check_absorbing_domain(const IfsSystem& F, const ArcUnion& U);

}  // namespace ifs
