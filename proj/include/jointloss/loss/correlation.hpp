#pragma once

#include "jointloss/loss/nosub.hpp"
#include "jointloss/loss/subordinated.hpp"
#include "jointloss/mc/estimate.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss {

enum class CorrelationMethod { monte_carlo, moments };

struct CorrelationResult {
    double value = 0.0;
    double se = 0.0;  ///< zero for the moment route
    CorrelationMethod method = CorrelationMethod::monte_carlo;
};

/// Pearson correlation of the two creditors' losses from the conditional
/// moments: Cov = Cov_{z,u}(E[L1|.], E[L2|.]) + E_{z,u}[Cov(L1, L2|.)].
/// Obligors are independent given (z, u), so this includes every delta part
/// and is exact up to quadrature error.
double correlation_from_moments(const NoSubScenario& scenario,
                                const quadrature::QuadratureSpec& quad);
double correlation_from_moments(const SubordinatedScenario& scenario,
                                const quadrature::QuadratureSpec& quad);

/// Loss correlation by Monte Carlo (default) or by the moment route.
/// UndefinedCorrelationError when a loss variance vanishes.
CorrelationResult loss_correlation(const NoSubScenario& scenario, CorrelationMethod method,
                                   const quadrature::QuadratureSpec& quad,
                                   const mc::McConfig& mc_config);
CorrelationResult loss_correlation(const SubordinatedScenario& scenario, CorrelationMethod method,
                                   const quadrature::QuadratureSpec& quad,
                                   const mc::McConfig& mc_config);

}  // namespace jointloss
