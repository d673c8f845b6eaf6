#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

namespace ifs {

// A double that remembers an exact rational origin, so map specs round-trip.
struct Real {
    double v = 0.0;
    std::optional<std::pair<std::int64_t, std::int64_t>> ratio;

    Real() = default;
    Real(double x) : v(x) {}
    static Real rational(std::int64_t num, std::int64_t den);

    operator double() const { return v; }
    bool exact() const { return ratio.has_value(); }
};

inline Real Q(std::int64_t num, std::int64_t den = 1) { return Real::rational(num, den); }

nlohmann::json to_json_value(const Real& r);
Real real_from_json(const nlohmann::json& j);

}  // namespace ifs
