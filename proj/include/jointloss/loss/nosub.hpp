#pragma once

#include <array>
#include <span>
#include <vector>

#include "jointloss/loss/density_grid.hpp"
#include "jointloss/loss/mixture.hpp"
#include "jointloss/model/market.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss {

/// `count` identical obligors with total face `face` in market block `market`;
/// creditor b owns the fraction `fraction[b]` of each obligor's portfolio
/// weight (the fractional face value f_k of the creditor's portfolio).
struct ObligorClass {
    int count = 0;
    double face = 0.0;
    int market = 0;
    std::array<double, 2> fraction{};
};

/// Loans without subordination: a loss is shared among the creditors in
/// proportion to their face values. One or two creditors, one to four markets.
struct NoSubScenario {
    MultiMarketParams markets;
    int creditors = 2;
    std::vector<ObligorClass> classes;

    int k_obligors() const noexcept;
    /// Checks block sizes against class counts and that every creditor's
    /// fractional faces sum to one.
    void validate() const;

    /// Two creditors on K homogeneous obligors of one market; r1 K and r12 K
    /// must be integers.
    static NoSubScenario overlap(const OverlapSpec& overlap, int k_obligors,
                                 const MarketParams& params);
    /// One creditor holding every obligor of every block, face f0 each.
    static NoSubScenario single_creditor(const MultiMarketParams& markets, double f0);
    /// Two creditors, creditor b owning all of block b (two blocks).
    static NoSubScenario creditor_per_market(const MultiMarketParams& markets, double f0);
};

struct Alphas {
    double a1 = 0.0;
    double a12 = 0.0;
    double a2 = 0.0;
};

/// Coefficients of the conditional covariance K M2 / (m2 - m1^2) for the
/// homogeneous overlap structure. DomainError if a creditor holds no face.
Alphas alphas(const OverlapSpec& overlap);

/// Conditional means and covariance of the creditors' losses at a node with
/// one u per market block.
struct NoSubTerms {
    std::array<double, 2> mean{};
    std::array<double, 3> cov{};  ///< (11, 12, 22)
};

NoSubTerms nosub_terms(double z, std::span<const double> u, const NoSubScenario& scenario);

/// Mixture over the fixed product rule. Two creditors; throws
/// SingularCovarianceError when the portfolios' weight vectors are parallel.
Mixture2 nosub_mixture(const NoSubScenario& scenario, const quadrature::QuadratureSpec& quad);

/// Univariate mixture of creditor `creditor`'s loss.
Mixture1 nosub_marginal_mixture(int creditor, const NoSubScenario& scenario,
                                const quadrature::QuadratureSpec& quad);

/// Density at the loss vector l (size = creditors) for a single market.
double density_nosub(std::span<const double> l, const NoSubScenario& scenario,
                     const quadrature::QuadratureSpec& quad);

/// Same for up to four market blocks; UnsupportedDimensionError beyond.
double density_nosub_multimarket(std::span<const double> l, const NoSubScenario& scenario,
                                 const quadrature::QuadratureSpec& quad);

/// P(L_creditor > threshold) of the second-order law.
double tail_probability_nosub(int creditor, double threshold, const NoSubScenario& scenario,
                              const quadrature::QuadratureSpec& quad);

/// Bivariate density grid (two creditors).
DensityGrid grid_nosub(const NoSubScenario& scenario, const quadrature::QuadratureSpec& quad,
                       const Axis& ax, const Axis& ay);

}  // namespace jointloss
