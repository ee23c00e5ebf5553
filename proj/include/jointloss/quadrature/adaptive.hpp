#pragma once

#include <functional>
#include <span>

namespace jointloss::quadrature {

struct AdaptiveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int initial_pieces = 8;
    int max_intervals = 4000;
};

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// The interval is first split uniformly into `initial_pieces` and at every
/// breakpoint inside (a, b); the piece with the largest error estimate is
/// bisected until the summed error drops below max(abs_tol, rel_tol |I|).
/// Throws ConvergenceError (with the best estimate) when max_intervals is hit.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& options,
                                  std::span<const double> breakpoints = {});

}  // namespace jointloss::quadrature
