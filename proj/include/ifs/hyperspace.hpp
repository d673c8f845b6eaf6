#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ifs/circle.hpp"
#include "ifs/circle_map.hpp"
#include "ifs/parallel.hpp"

namespace ifs {

inline constexpr double kDefaultDelta = 1.0 / 2048.0;

// Finite delta-net standing in for a compact subset of the circle.
class PointCloud {
public:
    PointCloud(std::vector<double> points, double delta);
    static PointCloud full_net(double delta);

    const std::vector<double>& points() const { return pts_; }
    double resolution() const { return delta_; }
    std::size_t size() const { return pts_.size(); }
    double nearest_distance(double x) const;

    bool operator==(const PointCloud& o) const { return pts_ == o.pts_; }

private:
    std::vector<double> pts_;
    double delta_;
};

// Wrap, sort, and collapse points closer than delta/2 (cyclically).
std::vector<double> merge_points(std::vector<double> pts, double delta);

double directed_distance(const PointCloud& from, const PointCloud& to);
double hausdorff_distance(const PointCloud& a, const PointCloud& b);
// O(nm) reference; used for testing and benchmarking the sweep.
double hausdorff_distance_bruteforce(const PointCloud& a, const PointCloud& b);

std::string cloud_csv(const PointCloud& c);

struct IfsSystem {
    std::vector<CircleMap> maps;
    std::string label;

    IfsSystem() = default;
    IfsSystem(std::vector<CircleMap> m, std::string l = "");

    std::size_t k() const { return maps.size(); }
    bool invertible() const;
    const CircleMap& map(int symbol) const { return maps.at(std::size_t(symbol - 1)); }
    IfsSystem inverse() const;

    nlohmann::json to_json() const;
    static IfsSystem from_json(const nlohmann::json& j);
};

PointCloud hutchinson_step(const IfsSystem& F, const PointCloud& S, Exec exec = Exec::Parallel);

struct IterateOptions {
    std::optional<double> stop_successive;  // defaults to delta/4
    std::optional<double> stop_target_below;
    bool throw_on_budget = true;
};

// Trajectory of (n, distance). Distances are to `target` when given, else to
// the previous iterate.
std::vector<std::pair<int, double>> iterate_to_attractor(const IfsSystem& F, const PointCloud& S, int budget_n,
                                                         const PointCloud* target = nullptr,
                                                         IterateOptions opt = {}, Exec exec = Exec::Parallel);

enum class Verdict { StrictAttractorEvidence, NotStrictAttractor, Inconclusive };
std::string to_string(Verdict v);

struct AttractorWitness {
    double seed = 0.0;
    int iterations = 0;
    double final_distance = 0.0;
    int first_dense = -1;  // first n with an epsilon-dense cloud, -1 if never
    int last_sparse = 0;   // last n without one
    double min_distance = 1.0;
};

struct AttractorReport {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<int> horizon_n0;
    double epsilon = 0.0;
    double delta = kDefaultDelta;
    int budget = 0;
    std::vector<AttractorWitness> witnesses;

    nlohmann::json to_json() const;
};

std::vector<double> seed_grid(int n);

AttractorReport strict_attractor_probe(const IfsSystem& F, double epsilon, const std::vector<double>& seeds,
                                       int budget_n, double delta = kDefaultDelta, Exec exec = Exec::Parallel);

struct StabilityViolation {
    Arc arc;
    int n = 0;
    double distance = 0.0;
};

struct StabilityReport {
    double epsilon = 0.0;
    int budget = 0;
    struct ArcResult {
        Arc arc;
        double max_distance = 0.0;
        std::optional<StabilityViolation> violation;
    };
    std::vector<ArcResult> arcs;
    double empirical_delta = 0.0;  // longest deletion with no violation
    std::optional<StabilityViolation> first_violation;

    nlohmann::json to_json() const;
};

StabilityReport stability_probe(const IfsSystem& F, double epsilon, const std::vector<Arc>& deletion_arcs,
                                int budget_n, double delta = kDefaultDelta, Exec exec = Exec::Parallel);

nlohmann::json arc_json(const Arc& a);

}  // namespace ifs
