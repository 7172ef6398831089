#pragma once

#include <functional>

namespace amplab {

struct MinimizeOptions {
    int grid_points = 512;
    double tol = 1e-8;     // absolute tolerance on the argument
};

struct MinimizeResult {
    double x = 0.0;
    double value = 0.0;
};

// Coarse grid scan over [lo, hi] followed by golden-section refinement of
// the bracketing interval.  Grid ties are broken toward the smaller
// argument.  The same routine (same grid size, same tolerance) backs both
// the empirical threshold search and the state-evolution inner solver so
// their results are comparable.
MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo,
                               double hi, const MinimizeOptions& opts = {});

struct RootOptions {
    double tol = 1e-10;        // |f| tolerance for a calibrated root
    double x_tol = 1e-13;      // relative bracket width cutoff
    int max_iter = 200;
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    bool converged = false;    // |f(x)| <= tol
};

// Bisection on an increasing (possibly discontinuous) function, given a
// bracket with f(lo) < 0 <= f(hi).  If f jumps over zero the bracket
// collapses onto the jump point and `converged` is false.
RootResult bisect_increasing(const std::function<double(double)>& f, double lo,
                             double hi, const RootOptions& opts = {});

}  // namespace amplab
