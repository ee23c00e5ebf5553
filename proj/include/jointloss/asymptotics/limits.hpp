#pragma once

#include "jointloss/asymptotics/implicit.hpp"
#include "jointloss/loss/density_grid.hpp"
#include "jointloss/model/market.hpp"

namespace jointloss {

enum class LimitQuality {
    ok = 0,
    near_singular = 1,   ///< a Jacobian factor at a root is below 1e-14
    multiple_roots = 2,  ///< the z0 scan found more than one root
};

struct LimitValue {
    double density = 0.0;
    LimitQuality quality = LimitQuality::ok;
    int roots = 0;
};

/// K -> infinity density of (L^S, L^J): at the root z0 of u^S(lS, z) = u^J(lJ, z),
///   chi2(z0) phi_N(u0) / (|d_u m^S| |d_u g| |d_z u^S - d_z u^J|),  g = m^S_0 + m^J_1,
/// summed over roots; zero where no root exists.
LimitValue density_limit_subordinated(double ls, double lj, const SubordinationSpec& spec,
                                      const MarketParams& params);

/// Density of the common loss of two infinite portfolios in one market:
///   int dz chi2(z) phi_N(u0(l, z)) / |d_u m_1(z, u0)|.
/// The two losses coincide, so the bivariate law lives on the line l1 = l2
/// and does not depend on the overlap structure.
double density_limit_equal_infinite(double l, double face, const MarketParams& params);

/// Finite portfolio of R1 obligors against an infinite disjoint one:
///   int dz chi2(z) phi_N(u0(l2, z)) N(l1; m_1, (m_2 - m_1^2)/R1) / |d_u m_1|.
double density_limit_finite_vs_infinite(double l1, double l2, int r1, double face,
                                        const MarketParams& params);

/// Two infinite portfolios in two markets sharing N (independent u per market):
///   int dz chi2(z) phi_N(u10) phi_N(u20) / (|d_u m_1,1| |d_u m_1,2|).
double density_limit_two_markets(double l1, double l2, double face1, const MarketParams& params1,
                                 double face2, const MarketParams& params2);

/// Limit density grid with the solver quality flag per point.
DensityGrid grid_limit_subordinated(const SubordinationSpec& spec, const MarketParams& params,
                                    const Axis& ax, const Axis& ay);

}  // namespace jointloss
