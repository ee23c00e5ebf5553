#include "jointloss/quadrature/integrate.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <vector>

#include "jointloss/errors.hpp"
#include "jointloss/quadrature/adaptive.hpp"

namespace jointloss::quadrature {

void QuadratureSpec::validate() const {
    if (z_nodes < 8 || u_nodes < 8) throw DomainError("quadrature: node counts must be >= 8");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) {
        throw DomainError("quadrature: rel_tol must lie in (0, 1e-3]");
    }
}

double factor_range(double n_fluct) { return kFactorSigmas / std::sqrt(n_fluct); }

double chi_squared_density(double z, double dof) {
    if (!(z > 0.0)) return 0.0;
    const double k = 0.5 * dof;
    return std::exp((k - 1.0) * std::log(z) - 0.5 * z - k * std::log(2.0) - std::lgamma(k));
}

double common_factor_density(double u, double n_fluct) {
    return std::sqrt(n_fluct / (2.0 * M_PI)) * std::exp(-0.5 * n_fluct * u * u);
}

double chi_squared_upper(double dof) {
    const boost::math::chi_squared_distribution<double> dist(dof);
    return boost::math::quantile(boost::math::complement(dist, 1e-10));
}

namespace {

AdaptiveOptions adaptive_options(const QuadratureSpec& spec) {
    AdaptiveOptions o;
    o.rel_tol = spec.rel_tol;
    o.abs_tol = 1e-300;
    o.initial_pieces = 16;
    o.max_intervals = 4000;
    return o;
}

double adaptive_chi2(const std::function<double(double)>& f, double n_fluct,
                     const QuadratureSpec& spec, std::span<const double> z_breakpoints) {
    // z = -2 ln s maps (0, inf) onto (0, 1); e^{-z/2} dz becomes 2 ds
    const double k = 0.5 * n_fluct;
    const double log_norm = std::log(2.0) - k * std::log(2.0) - std::lgamma(k);
    auto mapped = [&](double s) {
        const double z = -2.0 * std::log(s);
        if (!(z > 0.0)) return 0.0;
        return std::exp(log_norm + (k - 1.0) * std::log(z)) * f(z);
    };
    std::vector<double> cuts;
    for (double z : z_breakpoints) {
        if (z > 0.0) cuts.push_back(std::exp(-0.5 * z));
    }
    return integrate_adaptive(mapped, 0.0, 1.0, adaptive_options(spec), cuts).value;
}

double adaptive_gauss(const std::function<double(double)>& g, double n_fluct,
                      const QuadratureSpec& spec, std::span<const double> u_breakpoints) {
    const double r = factor_range(n_fluct);
    auto weighted = [&](double u) { return common_factor_density(u, n_fluct) * g(u); };
    return integrate_adaptive(weighted, -r, r, adaptive_options(spec), u_breakpoints).value;
}

double multi_recursive(const std::function<double(std::span<const double>)>& g,
                       std::vector<double>& point, int dim, double n_fluct,
                       const QuadratureSpec& spec, const Rule* rule) {
    const int beta = static_cast<int>(point.size());
    if (dim == beta) return g(point);
    if (rule) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule->size(); ++i) {
            point[dim] = rule->nodes[i];
            sum += rule->weights[i] * multi_recursive(g, point, dim + 1, n_fluct, spec, rule);
        }
        return sum;
    }
    return adaptive_gauss(
        [&](double u) {
            point[dim] = u;
            return multi_recursive(g, point, dim + 1, n_fluct, spec, rule);
        },
        n_fluct, spec, {});
}

}  // namespace

double integrate_chi2(const std::function<double(double)>& f, double n_fluct,
                      const QuadratureSpec& spec, std::span<const double> z_breakpoints) {
    spec.validate();
    if (!(n_fluct > 0.0)) throw DomainError("integrate_chi2: n_fluct must be positive");
    if (spec.mode == Mode::adaptive) return adaptive_chi2(f, n_fluct, spec, z_breakpoints);
    const Rule rule = chi_squared_rule(spec.z_nodes, n_fluct);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
    return sum;
}

double integrate_gauss(const std::function<double(double)>& g, double n_fluct,
                       const QuadratureSpec& spec, std::span<const double> u_breakpoints) {
    spec.validate();
    if (!(n_fluct > 0.0)) throw DomainError("integrate_gauss: n_fluct must be positive");
    if (spec.mode == Mode::adaptive) return adaptive_gauss(g, n_fluct, spec, u_breakpoints);
    const Rule rule = common_factor_rule(spec.u_nodes, n_fluct);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * g(rule.nodes[i]);
    return sum;
}

double integrate_gauss_multi(const std::function<double(std::span<const double>)>& g, int beta,
                             double n_fluct, const QuadratureSpec& spec) {
    spec.validate();
    if (beta < 1 || beta > kMaxTensorFactors) {
        throw UnsupportedDimensionError(
            "integrate_gauss_multi: tensor quadrature supports 1..4 markets; use the Monte Carlo "
            "oracle for more");
    }
    if (!(n_fluct > 0.0)) throw DomainError("integrate_gauss_multi: n_fluct must be positive");
    std::vector<double> point(beta);
    if (spec.mode == Mode::adaptive) return multi_recursive(g, point, 0, n_fluct, spec, nullptr);
    const Rule rule = common_factor_rule(spec.u_nodes, n_fluct);
    return multi_recursive(g, point, 0, n_fluct, spec, &rule);
}

ProductNodes product_nodes(double n_fluct, int beta, const QuadratureSpec& spec) {
    spec.validate();
    if (beta < 1 || beta > kMaxTensorFactors) {
        throw UnsupportedDimensionError("product_nodes: tensor quadrature supports 1..4 markets");
    }
    const Rule zr = chi_squared_rule(spec.z_nodes, n_fluct);
    const Rule ur = common_factor_rule(spec.u_nodes, n_fluct);
    std::size_t per_z = 1;
    for (int b = 0; b < beta; ++b) per_z *= ur.size();

    ProductNodes out;
    out.beta = beta;
    out.z.reserve(zr.size() * per_z);
    out.u.reserve(zr.size() * per_z * beta);
    out.weight.reserve(zr.size() * per_z);
    std::vector<std::size_t> idx(beta);
    for (std::size_t i = 0; i < zr.size(); ++i) {
        for (std::size_t flat = 0; flat < per_z; ++flat) {
            std::size_t rem = flat;
            double w = zr.weights[i];
            for (int b = beta - 1; b >= 0; --b) {
                idx[b] = rem % ur.size();
                rem /= ur.size();
            }
            for (int b = 0; b < beta; ++b) {
                out.u.push_back(ur.nodes[idx[b]]);
                w *= ur.weights[idx[b]];
            }
            out.z.push_back(zr.nodes[i]);
            out.weight.push_back(w);
        }
    }
    return out;
}

}  // namespace jointloss::quadrature
