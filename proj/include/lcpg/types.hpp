#pragma once

#include <Eigen/Core>
#include <limits>
#include <stdexcept>
#include <string>

namespace lcpg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi] on the real line. Used for coordinatewise
/// subdifferentials; supports Minkowski addition and scaling.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
    Interval scaled(double c) const { return c >= 0 ? Interval{c * lo, c * hi} : Interval{c * hi, c * lo}; }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Distance from 0 to the set g + [lo, hi].
inline double dist_to_shifted_interval(double g, const Interval& iv) {
    return std::max({0.0, g + iv.lo, -(g + iv.hi)});
}

/// Thrown when an operation is asked for a structure it does not support
/// (e.g. no closed-form prox for a composition).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on inconsistent dimensions or invalid construction data.
struct StructuralError : std::invalid_argument {
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a solver cannot meet its contract (budget exhausted,
/// infeasible start, numerical failure).
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lcpg
