#pragma once

#include "jointloss/loss/density_grid.hpp"
#include "jointloss/loss/mixture.hpp"
#include "jointloss/model/market.hpp"
#include "jointloss/model/moments.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss {

/// K homogeneous obligors whose debt is split into a senior and a junior piece.
struct SubordinatedScenario {
    int k_obligors = 0;
    SubordinationSpec spec;
    MarketParams params;

    /// Throws DomainError unless K >= 2 and spec, params are valid.
    void validate() const;
    /// The second-order expansion needs fractional faces 1/K to be small.
    bool accuracy_warning() const noexcept { return k_obligors < 8; }
};

/// Conditional first and second moments of (L^(S), L^(J)) at a node.
struct GaussianTerms {
    double m1s = 0.0;  ///< E[L^S | z, u]
    double m2s = 0.0;  ///< Var[L^S | z, u]
    double m1j = 0.0;  ///< E[L^J | z, u]
    double m2j = 0.0;  ///< Var[L^J | z, u]
    double ns = 0.0;   ///< Cov[L^S, L^J | z, u]

    /// Var[L^J | L^S, z, u] = m2j - ns^2/m2s.
    double conditional_variance() const noexcept { return m2j - ns * ns / m2s; }
};

GaussianTerms gaussian_moment_terms(double z, double u, const SubordinatedScenario& scenario);

/// Gaussian mixture over the fixed (z, u) product rule; the workhorse for
/// grids, cell masses, marginals and tails.
Mixture2 subordinated_mixture(const SubordinatedScenario& scenario,
                              const quadrature::QuadratureSpec& quad);

/// Pointwise density of the absolutely continuous part at (lS, lJ). Fixed-rule
/// mode sums the product rule; adaptive mode integrates with breakpoints at
/// the implicit roots, which large K needs.
double density_subordinated(double ls, double lj, const SubordinatedScenario& scenario,
                            const quadrature::QuadratureSpec& quad);

/// Marginal density of one tranche's portfolio loss at l.
double marginal_subordinated(Tranche which, double l, const SubordinatedScenario& scenario,
                             const quadrature::QuadratureSpec& quad);

/// Density grid at cell centers; metadata carries the accuracy warning for K < 8.
DensityGrid grid_subordinated(const SubordinatedScenario& scenario,
                              const quadrature::QuadratureSpec& quad, const Axis& ax,
                              const Axis& ay);

}  // namespace jointloss
