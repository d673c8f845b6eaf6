#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ifs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonInvertible : Error {
    using Error::Error;
};

struct IllFormedMap : Error {
    using Error::Error;
};

struct InputError : Error {
    using Error::Error;
};

// Thrown when an iterative search or simulation runs out of budget.
// `partial` holds whatever (index, value) trajectory was computed.
struct BudgetExhausted : Error {
    std::vector<std::pair<int, double>> partial;
    BudgetExhausted(const std::string& what, std::vector<std::pair<int, double>> p = {})
        : Error(what), partial(std::move(p)) {}
};

struct NotFound : Error {
    std::vector<double> uncovered;
    NotFound(const std::string& what, std::vector<double> u)
        : Error(what), uncovered(std::move(u)) {}
};

struct CoverMismatch : Error {
    using Error::Error;
};

struct NoBranch : Error {
    double point;
    NoBranch(const std::string& what, double p) : Error(what), point(p) {}
};

struct CoverFails : Error {
    double point;
    CoverFails(const std::string& what, double p) : Error(what), point(p) {}
};

struct NotContracting : Error {
    int word_index;
    double point;
    NotContracting(const std::string& what, int w, double p)
        : Error(what), word_index(w), point(p) {}
};

struct SearchExhausted : Error {
    using Error::Error;
};

}  // namespace ifs
