#pragma once

#include "jointloss/model/market.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss {

/// P^(ND) = E_{z,u}[(1 - m_0(z, u))^K]: weight of the delta peak at zero loss
/// for K homogeneous obligors with face value `face`.
double no_default_probability(int k_obligors, double face, const MarketParams& params,
                              const quadrature::QuadratureSpec& quad);

}  // namespace jointloss
