#pragma once

#include <cstdint>
#include <random>

namespace ifs {

// Splittable generator: children are keyed by (parent key, stream id) so
// every consumer draws from its own reproducible stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    Rng split(std::uint64_t stream) const;
    std::uint64_t key() const { return key_; }

    double uniform(double lo = 0.0, double hi = 1.0);
    int integer(int lo, int hi);  // inclusive
    std::mt19937_64& engine() { return eng_; }

private:
    std::uint64_t key_;
    std::mt19937_64 eng_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ifs
