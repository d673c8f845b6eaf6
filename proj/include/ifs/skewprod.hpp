#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ifs/hyperspace.hpp"
#include "ifs/rng.hpp"
#include "ifs/semigroup.hpp"

namespace ifs {

struct TailRule {
    enum class Kind { ConstantSymbol, PeriodicFromLastBlock };
    Kind kind = Kind::ConstantSymbol;
    int symbol = 1;  // ConstantSymbol
    int block = 0;   // PeriodicFromLastBlock; 0 means the whole side

    static TailRule constant(int s) { return {Kind::ConstantSymbol, s, 0}; }
    static TailRule periodic(int block = 0) { return {Kind::PeriodicFromLastBlock, 1, block}; }
};

// A bi-infinite sequence given by a finite window plus a tail rule. Shifts and
// the involution only change the affine index map i -> offset + sign*i into
// the base sequence.
class SymbolWindow {
public:
    SymbolWindow() = default;
    SymbolWindow(std::vector<int> past, std::vector<int> future, TailRule tail = {});

    int at(long i) const { return base(offset_ + sign_ * i); }
    SymbolWindow shifted(long n) const;
    SymbolWindow involuted() const;  // omega'_i = omega_{-i-1}
    void validate(int k) const;

    const std::vector<int>& past() const { return past_; }
    const std::vector<int>& future() const { return future_; }
    const TailRule& tail() const { return tail_; }
    long offset() const { return offset_; }
    int sign() const { return sign_; }

    nlohmann::json to_json() const;
    static SymbolWindow from_json(const nlohmann::json& j);

private:
    int base(long i) const;

    std::vector<int> past_;    // positions -m..-1
    std::vector<int> future_;  // positions 0..t
    TailRule tail_;
    long offset_ = 0;
    int sign_ = 1;
};

struct Cylinder {
    enum class Side { TwoSided, NegOnly, PosOnly };
    std::vector<int> neg_word;  // positions -s..-1
    std::vector<int> pos_word;  // positions 0..t
    Side side = Side::TwoSided;

    bool contains(const SymbolWindow& w) const;
    nlohmann::json to_json() const;
};

// Phi^n(omega, x): forward steps apply f_{omega_0} then shift; backward steps
// shift back and apply f_{omega_{-1}}^{-1}.
std::pair<SymbolWindow, double> skew_step(const IfsSystem& F, const SymbolWindow& w, double x, long n);

// f_omega^n(x) for n >= 0 and f_omega^{-n}(x) for n < 0, without the shift.
double fiber_word(const IfsSystem& F, const SymbolWindow& w, double x, long n);

struct ConjugacyReport {
    int trials = 0;
    double max_discrepancy = 0.0;
    nlohmann::json to_json() const;
};

ConjugacyReport conjugacy_check(const IfsSystem& F, int trials, Rng rng, int max_n = 20);

// Random window of the given half-length with symbols in 1..k.
SymbolWindow random_window(Rng& rng, int k, int half_length, TailRule tail = {});

struct LeafWitness {
    int n = 0;
    Word sigma;
    double point = 0.0;
};

struct LeafReport {
    enum class Kind { Unstable, Stable };
    Kind kind = Kind::Unstable;
    SymbolWindow window;
    double x = 0.0;
    int depth = 0;
    PointCloud fiber_projection{{0.0}, kDefaultDelta};
    std::vector<LeafWitness> witnesses;

    nlohmann::json to_json() const;
};

LeafReport unstable_leaf_projection(const IfsSystem& F, const SymbolWindow& w, double x, int depth,
                                    double prune_delta = kDefaultDelta);
LeafReport stable_leaf_projection(const IfsSystem& F, const SymbolWindow& w, double x, int depth,
                                  double prune_delta = kDefaultDelta);

// Unpruned reference: every sigma in {1..k}^n for each n <= depth.
PointCloud leaf_projection_bruteforce(const IfsSystem& F, const SymbolWindow& w, double x, int depth, double delta,
                                      LeafReport::Kind kind = LeafReport::Kind::Unstable);

// Indices of witnesses whose replay misses the stored point by more than tol.
std::vector<int> replay_leaf(const IfsSystem& F, const LeafReport& r, double tol = 10 * kTolInv);

struct LeafDensityWitness {
    Word sigma;  // beta then alpha
    int n = 0;
    int m = 0;
    double point = 0.0;
    nlohmann::json to_json() const;
};

// Finds a point of W^uu(omega, x) in target x target_arc.
LeafDensityWitness leaf_density_certify(const IfsSystem& F, const AttractorReport& attractor, const SymbolWindow& w,
                                        double x, const Cylinder& target, const Arc& target_arc,
                                        double prune_delta = kDefaultDelta);

struct SkewSample {
    Cylinder C, D;
    Arc U, V;
};

struct SkewTransitivityReport {
    struct Result {
        bool ok = false;
        long n = 0;
        std::string reason;
    };
    std::vector<Result> results;
    int failures() const;
    nlohmann::json to_json() const;
};

SkewTransitivityReport skew_transitivity_check(const IfsSystem& F, const DensityCertificate& trans_cert,
                                               const std::vector<SkewSample>& samples);

}  // namespace ifs
