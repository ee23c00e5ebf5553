#pragma once

#include <cstddef>
#include <vector>

namespace jointloss::quadrature {

/// Nodes and weights of a Gauss rule. Weights are normalized so that they
/// integrate the underlying probability measure: sum(weights) == 1.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
};

/// Generalized Gauss-Laguerre rule for the Gamma(alpha + 1, 1) density
/// t^alpha e^{-t} / Gamma(alpha + 1) on (0, inf). Golub-Welsch.
Rule gauss_laguerre_rule(int n, double alpha);

/// Gauss-Hermite rule for the density e^{-v^2} / sqrt(pi).
Rule gauss_hermite_rule(int n);

/// Rule for the chi-squared density with `dof` degrees of freedom:
/// Gauss-Laguerre with alpha = dof/2 - 1 after z = 2t.
Rule chi_squared_rule(int n, double dof);

/// Rule for the common factor u ~ N(0, 1/n_fluct): Gauss-Hermite after
/// u = v sqrt(2/n_fluct).
Rule common_factor_rule(int n, double n_fluct);

}  // namespace jointloss::quadrature
