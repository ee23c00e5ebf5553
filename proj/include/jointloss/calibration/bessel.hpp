#pragma once

namespace jointloss {

/// ln K_nu(x) for real order nu and x > 0. Uses Boost's cyl_bessel_k where
/// the value is representable and otherwise the integral
/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, summed in log space.
double log_bessel_k(double nu, double x);

}  // namespace jointloss
