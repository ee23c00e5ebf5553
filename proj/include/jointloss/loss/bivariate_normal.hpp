#pragma once

namespace jointloss {

/// P(X <= x, Y <= y) for standard normals with correlation r in [-1, 1].
/// Genz's refinement of the Drezner-Wesolowsky method, ~1e-15 absolute error.
double bvn_cdf(double x, double y, double r);

}  // namespace jointloss
