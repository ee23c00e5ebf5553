#pragma once

#include <functional>
#include <span>
#include <vector>

#include "jointloss/quadrature/rules.hpp"

namespace jointloss::quadrature {

enum class Mode { fixed_rule, adaptive };

/// How the compound (z, u) integrals are evaluated.
///
/// Fixed-rule mode uses z_nodes Gauss-Laguerre nodes and u_nodes Gauss-Hermite
/// nodes per common factor. Adaptive mode integrates z through z = -2 ln s on
/// (0, 1) and u on [-12/sqrt(N), 12/sqrt(N)] with Gauss-Kronrod bisection.
struct QuadratureSpec {
    int z_nodes = 128;
    int u_nodes = 128;
    Mode mode = Mode::fixed_rule;
    double rel_tol = 1e-6;

    /// Throws DomainError unless node counts >= 8 and rel_tol in (0, 1e-3].
    void validate() const;
};

/// Half-width of the u range in units of the factor's standard deviation.
inline constexpr double kFactorSigmas = 12.0;

/// The u range used by adaptive mode and the root solvers: 12/sqrt(N).
double factor_range(double n_fluct);

/// Normalized chi-squared density with `dof` degrees of freedom.
double chi_squared_density(double z, double dof);

/// Density of the common factor u ~ N(0, 1/n_fluct).
double common_factor_density(double u, double n_fluct);

/// Upper z bound used by the root solvers: the 1 - 1e-10 chi-squared quantile.
double chi_squared_upper(double dof);

/// int_0^inf chi2_N(z) f(z) dz.
double integrate_chi2(const std::function<double(double)>& f, double n_fluct,
                      const QuadratureSpec& spec, std::span<const double> z_breakpoints = {});

/// int sqrt(N/2pi) exp(-N u^2/2) g(u) du.
double integrate_gauss(const std::function<double(double)>& g, double n_fluct,
                       const QuadratureSpec& spec, std::span<const double> u_breakpoints = {});

/// beta-fold product of integrate_gauss over u = (u_1..u_beta); beta in 1..4.
/// Throws UnsupportedDimensionError otherwise.
double integrate_gauss_multi(const std::function<double(std::span<const double>)>& g, int beta,
                             double n_fluct, const QuadratureSpec& spec);

inline constexpr int kMaxTensorFactors = 4;

/// Flattened tensor-product nodes (z, u_1..u_beta) with product weights, for
/// engines that tabulate moments once per node.
struct ProductNodes {
    int beta = 1;
    std::vector<double> z;
    std::vector<double> u;  ///< beta entries per node, row-major
    std::vector<double> weight;

    std::size_t size() const noexcept { return z.size(); }
    std::span<const double> factors(std::size_t node) const {
        return {u.data() + node * beta, static_cast<std::size_t>(beta)};
    }
};

ProductNodes product_nodes(double n_fluct, int beta, const QuadratureSpec& spec);

}  // namespace jointloss::quadrature
