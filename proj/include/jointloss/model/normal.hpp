#pragma once

#include <cmath>

namespace jointloss {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2pi)

/// Standard normal CDF, Phi(x) = 1/2 + 1/2 erf(x/sqrt 2). Evaluated through
/// erfc so that both tails keep full relative precision.
[[nodiscard]] inline double phi(double x) noexcept {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// Standard normal density.
[[nodiscard]] inline double normal_pdf(double x) noexcept {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Density of N(mean, variance) at x.
[[nodiscard]] inline double gaussian_pdf(double x, double mean, double variance) noexcept {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * M_PI * variance);
}

}  // namespace jointloss
