#include "ifs/real.hpp"

#include <numeric>
#include <stdexcept>

namespace ifs {

Real Real::rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    Real r(static_cast<double>(num) / static_cast<double>(den));
    r.ratio = std::make_pair(num, den);
    return r;
}

nlohmann::json to_json_value(const Real& r) {
    if (r.ratio) return nlohmann::json::array({r.ratio->first, r.ratio->second});
    return r.v;
}

Real real_from_json(const nlohmann::json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw std::invalid_argument("rational must be [num, den]");
        return Real::rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
    }
    if (!j.is_number()) throw std::invalid_argument("expected a number or [num, den]");
    return Real(j.get<double>());
}

}  // namespace ifs
