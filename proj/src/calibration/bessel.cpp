#include "jointloss/calibration/bessel.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <vector>

#include "jointloss/errors.hpp"

namespace jointloss {

namespace {

double log_cosh(double y) {
    y = std::abs(y);
    return y + std::log1p(std::exp(-2.0 * y)) - std::log(2.0);
}

// Trapezoid rule on the even, doubly exponentially decaying integrand; the
// error decreases geometrically in 1/h.
double log_bessel_k_integral(double nu, double x) {
    nu = std::abs(nu);
    auto log_f = [&](double t) { return -x * std::cosh(t) + log_cosh(nu * t); };
    // locate the maximum on a coarse scan
    double t_max = 0.0, f_max = log_f(0.0);
    for (double t = 0.05; t < 60.0; t += 0.05) {
        const double f = log_f(t);
        if (f > f_max) {
            f_max = f;
            t_max = t;
        } else if (f < f_max - 60.0) {
            break;
        }
    }
    double t_end = t_max + 0.05;
    while (log_f(t_end) > f_max - 50.0 && t_end < 700.0) t_end += 0.05;
    const int steps = 4000;
    const double h = t_end / steps;
    double sum = 0.5 * std::exp(log_f(0.0) - f_max);
    for (int i = 1; i <= steps; ++i) sum += std::exp(log_f(i * h) - f_max);
    return f_max + std::log(sum * h);
}

}  // namespace

double log_bessel_k(double nu, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_bessel_k: x must be positive");
    try {
        const double k = boost::math::cyl_bessel_k(nu, x);
        if (std::isfinite(k) && k > 1e-290 && k < 1e290) return std::log(k);
    } catch (const std::exception&) {
        // overflow or underflow: fall through to the log-space integral
    }
    return log_bessel_k_integral(nu, x);
}

}  // namespace jointloss
