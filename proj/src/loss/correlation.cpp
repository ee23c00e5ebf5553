#include "jointloss/loss/correlation.hpp"

#include <cmath>

#include "jointloss/errors.hpp"

namespace jointloss {

namespace {

// Below this variance the loss is treated as degenerate.
constexpr double kMinVariance = 1e-15;

struct MomentSums {
    double w = 0, m1 = 0, m2 = 0, m11 = 0, m22 = 0, m12 = 0, c11 = 0, c22 = 0, c12 = 0;

    void add(double weight, double a, double b, double v1, double v2, double c) {
        w += weight;
        m1 += weight * a;
        m2 += weight * b;
        m11 += weight * a * a;
        m22 += weight * b * b;
        m12 += weight * a * b;
        c11 += weight * v1;
        c22 += weight * v2;
        c12 += weight * c;
    }

    double correlation() const {
        const double e1 = m1 / w, e2 = m2 / w;
        const double v1 = m11 / w - e1 * e1 + c11 / w;
        const double v2 = m22 / w - e2 * e2 + c22 / w;
        const double cov = m12 / w - e1 * e2 + c12 / w;
        if (!(v1 > kMinVariance) || !(v2 > kMinVariance)) {
            throw UndefinedCorrelationError(
                "loss correlation: a portfolio loss has (numerically) zero variance");
        }
        return cov / std::sqrt(v1 * v2);
    }
};

double finish_mc(const mc::McRun& run, CorrelationResult& out) {
    for (int b = 0; b < 2; ++b) {
        if (!(run.creditor[b].variance > kMinVariance)) {
            throw UndefinedCorrelationError(
                "loss correlation: a portfolio loss has (numerically) zero sample variance");
        }
    }
    out.se = run.correlation.se;
    return run.correlation.value;
}

}  // namespace

double correlation_from_moments(const NoSubScenario& scenario,
                                const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    if (scenario.creditors != 2) throw DomainError("loss correlation: two creditors required");
    const auto nodes =
        quadrature::product_nodes(scenario.markets.n_fluct, scenario.markets.beta(), quad);
    MomentSums s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto t = nosub_terms(nodes.z[i], nodes.factors(i), scenario);
        s.add(nodes.weight[i], t.mean[0], t.mean[1], t.cov[0], t.cov[2], t.cov[1]);
    }
    return s.correlation();
}

double correlation_from_moments(const SubordinatedScenario& scenario,
                                const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    const auto nodes = quadrature::product_nodes(scenario.params.n_fluct, 1, quad);
    MomentSums s;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto t = gaussian_moment_terms(nodes.z[i], nodes.u[i], scenario);
        s.add(nodes.weight[i], t.m1s, t.m1j, t.m2s, t.m2j, t.ns);
    }
    return s.correlation();
}

CorrelationResult loss_correlation(const NoSubScenario& scenario, CorrelationMethod method,
                                   const quadrature::QuadratureSpec& quad,
                                   const mc::McConfig& mc_config) {
    CorrelationResult out;
    out.method = method;
    if (method == CorrelationMethod::moments) {
        out.value = correlation_from_moments(scenario, quad);
        return out;
    }
    const mc::McProblem problem{scenario.markets, mc::LossStructure::nosub(scenario)};
    out.value = finish_mc(mc::estimate(problem, mc_config), out);
    return out;
}

CorrelationResult loss_correlation(const SubordinatedScenario& scenario, CorrelationMethod method,
                                   const quadrature::QuadratureSpec& quad,
                                   const mc::McConfig& mc_config) {
    CorrelationResult out;
    out.method = method;
    if (method == CorrelationMethod::moments) {
        out.value = correlation_from_moments(scenario, quad);
        return out;
    }
    scenario.validate();
    const mc::McProblem problem{MultiMarketParams::single(scenario.params, scenario.k_obligors),
                                mc::LossStructure::subordinated(scenario.spec, scenario.k_obligors)};
    out.value = finish_mc(mc::estimate(problem, mc_config), out);
    return out;
}

}  // namespace jointloss
