#include "jointloss/loss/subordinated.hpp"

#include <cmath>
#include <vector>

#include "jointloss/asymptotics/implicit.hpp"
#include "jointloss/errors.hpp"
#include "jointloss/parallel.hpp"
#include "jointloss/model/normal.hpp"
#include "jointloss/quadrature/adaptive.hpp"
#include "jointloss/quadrature/rules.hpp"

namespace jointloss {

void SubordinatedScenario::validate() const {
    if (k_obligors < 2) throw DomainError("subordinated scenario: K must be at least 2");
    spec.validate();
    params.validate();
}

namespace {

GaussianTerms terms_from(const SubordinatedMoments& m, double k) {
    const auto& s = m.senior;
    const auto& j = m.junior;
    GaussianTerms t;
    t.m1s = s[1];
    t.m2s = (s[2] - s[1] * s[1]) / k;
    t.m1j = s[0] + j[1];
    t.m2j = (s[0] + j[2] - s[0] * s[0] - j[1] * j[1] - 2.0 * s[0] * j[1]) / k;
    t.ns = s[1] * (1.0 - s[0] - j[1]) / k;
    return t;
}

Gaussian2 component(double weight, const GaussianTerms& t) {
    return {weight, t.m1s, t.m1j, t.m2s, t.m2j, t.ns};
}

double conditional_density(double ls, double lj, const GaussianTerms& t) {
    if (!(t.m2s > 0.0)) return 0.0;
    const double cv = t.conditional_variance();
    if (!(cv > 0.0) || !std::isfinite(cv)) return 0.0;
    const double mean_j = t.m1j + t.ns / t.m2s * (ls - t.m1s);
    return gaussian_pdf(ls, t.m1s, t.m2s) * gaussian_pdf(lj, mean_j, cv);
}

double adaptive_point(double ls, double lj, const SubordinatedScenario& sc,
                      const quadrature::QuadratureSpec& quad) {
    const auto& p = sc.params;
    const double r = quadrature::factor_range(p.n_fluct);
    const double k = sc.k_obligors;

    quadrature::AdaptiveOptions inner;
    inner.rel_tol = quad.rel_tol;
    inner.abs_tol = 1e-14;
    inner.initial_pieces = 16;
    inner.max_intervals = 4000;

    auto over_u = [&](double z) {
        std::vector<double> cuts;
        if (p.c > 0.0) {
            auto mean_s = [&](double u) { return senior_mean_loss(z, u, sc.spec, p); };
            auto mean_j = [&](double u) { return junior_mean_loss(z, u, sc.spec, p); };
            if (auto s = invert_increasing(mean_s, ls, -r, r)) cuts.push_back(s->root);
            if (auto j = invert_increasing(mean_j, lj, -r, r)) cuts.push_back(j->root);
        }
        auto g = [&](double u) {
            const auto t = terms_from(subordinated_moments(z, u, sc.spec, p), k);
            return quadrature::common_factor_density(u, p.n_fluct) * conditional_density(ls, lj, t);
        };
        return quadrature::integrate_adaptive(g, -r, r, inner, cuts).value;
    };

    // z = -2 ln s maps the chi-squared weight to (0, 1), breakpoints at z0 roots
    std::vector<double> cuts;
    if (p.c > 0.0) {
        for (const auto& root : scan_z0(ls, lj, sc.spec, p).roots) {
            cuts.push_back(std::exp(-0.5 * root.z0));
        }
    }
    const double half = 0.5 * p.n_fluct;
    const double log_norm = std::log(2.0) - half * std::log(2.0) - std::lgamma(half);
    auto outer = [&](double s) {
        const double z = -2.0 * std::log(s);
        if (!(z > 0.0) || !std::isfinite(z)) return 0.0;
        return std::exp(log_norm + (half - 1.0) * std::log(z)) * over_u(z);
    };
    quadrature::AdaptiveOptions opts = inner;
    opts.abs_tol = 1e-12;
    return quadrature::integrate_adaptive(outer, 0.0, 1.0, opts, cuts).value;
}

}  // namespace

GaussianTerms gaussian_moment_terms(double z, double u, const SubordinatedScenario& scenario) {
    return terms_from(subordinated_moments(z, u, scenario.spec, scenario.params),
                      scenario.k_obligors);
}

Mixture2 subordinated_mixture(const SubordinatedScenario& scenario,
                              const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    quad.validate();
    const auto nodes = quadrature::product_nodes(scenario.params.n_fluct, 1, quad);
    Mixture2 mix;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        mix.add(component(nodes.weight[i], gaussian_moment_terms(nodes.z[i], nodes.u[i], scenario)));
    }
    return mix;
}

double density_subordinated(double ls, double lj, const SubordinatedScenario& scenario,
                            const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    quad.validate();
    if (quad.mode == quadrature::Mode::adaptive) return adaptive_point(ls, lj, scenario, quad);
    const auto nodes = quadrature::product_nodes(scenario.params.n_fluct, 1, quad);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        sum += nodes.weight[i] *
               conditional_density(ls, lj, gaussian_moment_terms(nodes.z[i], nodes.u[i], scenario));
    }
    return sum;
}

double marginal_subordinated(Tranche which, double l, const SubordinatedScenario& scenario,
                             const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    auto g = [&](double z, double u) {
        const auto t = gaussian_moment_terms(z, u, scenario);
        const double mean = which == Tranche::senior ? t.m1s : t.m1j;
        const double var = which == Tranche::senior ? t.m2s : t.m2j;
        return var > 0.0 ? gaussian_pdf(l, mean, var) : 0.0;
    };
    return quadrature::integrate_chi2(
        [&](double z) {
            return quadrature::integrate_gauss([&](double u) { return g(z, u); },
                                               scenario.params.n_fluct, quad);
        },
        scenario.params.n_fluct, quad);
}

DensityGrid grid_subordinated(const SubordinatedScenario& scenario,
                              const quadrature::QuadratureSpec& quad, const Axis& ax,
                              const Axis& ay) {
    DensityGrid grid(ax, ay);
    if (quad.mode == quadrature::Mode::adaptive) {
        parallel_for(grid.values.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                const int i = static_cast<int>(k / ay.cells), j = static_cast<int>(k % ay.cells);
                grid.values[k] = density_subordinated(ax.center(i), ay.center(j), scenario, quad);
            }
        });
    } else {
        const Mixture2 mix = subordinated_mixture(scenario, quad);
        grid.values = mix.grid_density(ax, ay);
        grid.metadata["skipped_node_weight"] = mix.skipped_weight();
    }
    grid.metadata["accuracy_warning"] = scenario.accuracy_warning();
    return grid;
}

}  // namespace jointloss
