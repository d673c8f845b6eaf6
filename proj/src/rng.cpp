#include "ifs/rng.hpp"

namespace ifs {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : key_(splitmix64(seed)), eng_(key_) {}

Rng Rng::split(std::uint64_t stream) const {
    Rng r(0);
    r.key_ = splitmix64(key_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    r.eng_.seed(r.key_);
    return r;
}

// Drawn from raw engine bits rather than std distributions so streams match
// across standard library implementations.
double Rng::uniform(double lo, double hi) {
    double u = double(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

int Rng::integer(int lo, int hi) {
    std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + int(eng_() % span);
}

}  // namespace ifs
