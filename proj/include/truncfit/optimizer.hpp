#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace truncfit {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Settings for the grid-then-refine minimizer.
struct OptimizerConfig {
    std::vector<Interval> bounds;  ///< one per free parameter; empty = family defaults
    int grid_points = 200;         ///< per dimension
    double refine_tol = 1e-7;      ///< absolute, on parameters
    int max_refine_iters = 200;

    /// Throws InvalidArgument if the invariants do not hold for `dims` parameters.
    void validate(std::size_t dims) const;
};

using Objective = std::function<double(std::span<const double>)>;

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    int iterations = 0;
    bool converged = false;
    /// Best objective value after each refinement iteration.
    std::vector<double> trace;
};

/// Derivative-free minimization over a box in one or two dimensions.
///
/// A uniform grid is scanned first (ties go to the smaller parameter, first
/// coordinate first); infeasible points return +infinity. The best cell is
/// then refined by golden-section search in 1D or Nelder-Mead (restarted from
/// its own optimum until it stops improving) in 2D. Throws OptimizerError if
/// every grid point is infeasible.
MinimizeResult minimize(const Objective& f, const OptimizerConfig& config);

/// Root of a continuous f on [lo, hi] by bisection, refined until the bracket
/// no longer shrinks in double precision. If f(lo) and f(hi) share a sign,
/// the grid of `grid_points` is scanned for the first sign change. Throws
/// NoRootError when there is none.
struct RootResult {
    double x = 0.0;
    std::size_t evaluations = 0;
    double bracket_width = 0.0;
};

RootResult find_root(const std::function<double(double)>& f, Interval bounds, int grid_points);

}  // namespace truncfit
