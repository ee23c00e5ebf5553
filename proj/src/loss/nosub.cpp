#include "jointloss/loss/nosub.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "jointloss/asymptotics/implicit.hpp"
#include "jointloss/errors.hpp"
#include "jointloss/parallel.hpp"
#include "jointloss/model/moments.hpp"
#include "jointloss/model/normal.hpp"
#include "jointloss/quadrature/adaptive.hpp"

namespace jointloss {

namespace {

int integral_count(double fraction, int k, const char* what) {
    const double n = fraction * k;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-9 * std::max(1.0, n)) {
        throw DomainError(std::string("overlap: ") + what + " * K must be an integer");
    }
    return static_cast<int>(r);
}

// Obligor classes sharing a face value and market have identical moments.
struct MomentKey {
    double face;
    int market;
    std::array<double, 3> weight;  // sum of count * f_a * f_b over (11, 12, 22)
    std::array<double, 2> mean_weight;
};

std::vector<MomentKey> moment_keys(const NoSubScenario& sc) {
    std::map<std::pair<double, int>, std::size_t> index;
    std::vector<MomentKey> keys;
    for (const auto& c : sc.classes) {
        auto [it, inserted] = index.try_emplace({c.face, c.market}, keys.size());
        if (inserted) keys.push_back({c.face, c.market, {}, {}});
        auto& k = keys[it->second];
        const double n = c.count;
        k.weight[0] += n * c.fraction[0] * c.fraction[0];
        k.weight[1] += n * c.fraction[0] * c.fraction[1];
        k.weight[2] += n * c.fraction[1] * c.fraction[1];
        k.mean_weight[0] += n * c.fraction[0];
        k.mean_weight[1] += n * c.fraction[1];
    }
    return keys;
}

NoSubTerms terms_from_keys(double z, std::span<const double> u, const NoSubScenario& sc,
                           const std::vector<MomentKey>& keys) {
    NoSubTerms t;
    for (const auto& k : keys) {
        const auto m = plain_moments(z, u[k.market], k.face, sc.markets.blocks[k.market].params);
        const double var = m[2] - m[1] * m[1];
        t.mean[0] += k.mean_weight[0] * m[1];
        t.mean[1] += k.mean_weight[1] * m[1];
        for (int i = 0; i < 3; ++i) t.cov[i] += k.weight[i] * var;
    }
    return t;
}

void require_nonsingular(const std::vector<MomentKey>& keys) {
    std::array<double, 3> s{};
    for (const auto& k : keys) {
        for (int i = 0; i < 3; ++i) s[i] += k.weight[i];
    }
    if (!(s[0] * s[2] - s[1] * s[1] > 1e-12 * s[0] * s[2])) {
        throw SingularCovarianceError(
            "nosub: the two portfolios have proportional weights, so the conditional covariance "
            "is singular; use the equal-loss limit (mode limit-equal) for identical portfolios");
    }
}

double conditional_density(std::span<const double> l, const NoSubTerms& t, int creditors) {
    if (creditors == 1) return t.cov[0] > 0.0 ? gaussian_pdf(l[0], t.mean[0], t.cov[0]) : 0.0;
    if (!(t.cov[0] > 0.0)) return 0.0;
    const double cv = t.cov[2] - t.cov[1] * t.cov[1] / t.cov[0];
    if (!(cv > 0.0) || !std::isfinite(cv)) return 0.0;
    const double m2 = t.mean[1] + t.cov[1] / t.cov[0] * (l[0] - t.mean[0]);
    return gaussian_pdf(l[0], t.mean[0], t.cov[0]) * gaussian_pdf(l[1], m2, cv);
}

void check_losses(std::span<const double> l, const NoSubScenario& sc) {
    if (static_cast<int>(l.size()) != sc.creditors) {
        throw DomainError("nosub: loss vector size must equal the number of creditors");
    }
}

double adaptive_single_market(std::span<const double> l, const NoSubScenario& sc,
                              const std::vector<MomentKey>& keys,
                              const quadrature::QuadratureSpec& quad) {
    const auto& p = sc.markets.blocks[0].params;
    const double r = quadrature::factor_range(p.n_fluct);
    quadrature::AdaptiveOptions opts;
    opts.rel_tol = quad.rel_tol;
    opts.abs_tol = 1e-14;
    opts.initial_pieces = 16;
    auto over_u = [&](double z) {
        std::vector<double> cuts;
        if (p.c > 0.0) {
            for (int b = 0; b < sc.creditors; ++b) {
                auto mean = [&](double u) {
                    Jet j;
                    for (const auto& k : keys) {
                        const Jet m = plain_mean_loss(z, u, k.face, p);
                        j.value += k.mean_weight[b] * m.value;
                        j.d_z += k.mean_weight[b] * m.d_z;
                        j.d_u += k.mean_weight[b] * m.d_u;
                    }
                    return j;
                };
                if (auto s = invert_increasing(mean, l[b], -r, r)) cuts.push_back(s->root);
            }
        }
        auto g = [&](double u) {
            const double uu[1] = {u};
            return quadrature::common_factor_density(u, p.n_fluct) *
                   conditional_density(l, terms_from_keys(z, uu, sc, keys), sc.creditors);
        };
        return quadrature::integrate_adaptive(g, -r, r, opts, cuts).value;
    };
    return quadrature::integrate_chi2(over_u, p.n_fluct, quad);
}

}  // namespace

int NoSubScenario::k_obligors() const noexcept {
    int k = 0;
    for (const auto& c : classes) k += c.count;
    return k;
}

void NoSubScenario::validate() const {
    markets.validate();
    if (creditors < 1 || creditors > 2) throw DomainError("nosub: one or two creditors supported");
    if (classes.empty()) throw DomainError("nosub: no obligors");
    std::vector<int> per_market(markets.blocks.size(), 0);
    std::array<double, 2> total{};
    for (const auto& c : classes) {
        if (c.count < 0) throw DomainError("nosub: negative obligor count");
        if (!(c.face > 0.0)) throw DomainError("nosub: face values must be positive");
        if (c.market < 0 || c.market >= markets.beta()) {
            throw DomainError("nosub: obligor class refers to an unknown market");
        }
        per_market[c.market] += c.count;
        for (int b = 0; b < 2; ++b) {
            if (c.fraction[b] < 0.0) throw DomainError("nosub: negative fractional face value");
            total[b] += c.count * c.fraction[b];
        }
    }
    for (int m = 0; m < markets.beta(); ++m) {
        if (per_market[m] != markets.blocks[m].size) {
            throw DomainError("nosub: obligor counts do not match the market block sizes");
        }
    }
    for (int b = 0; b < creditors; ++b) {
        if (std::abs(total[b] - 1.0) > 1e-9) {
            throw DomainError("nosub: fractional face values of each creditor must sum to 1");
        }
    }
}

NoSubScenario NoSubScenario::overlap(const OverlapSpec& ov, int k, const MarketParams& params) {
    ov.validate();
    if (k < 2) throw DomainError("nosub: K must be at least 2");
    const int r1 = integral_count(ov.r1, k, "r1");
    const int r12 = integral_count(ov.r12, k, "r12");
    const int r2 = k - r1 - r12;
    const double d1 = r1 + ov.gamma * r12;
    const double d2 = k - r1 - ov.gamma * r12;
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw DomainError("overlap: a creditor holds no face value");

    NoSubScenario sc;
    sc.markets = MultiMarketParams::single(params, k);
    sc.creditors = 2;
    if (r1 > 0) sc.classes.push_back({r1, ov.f0, 0, {1.0 / d1, 0.0}});
    if (r12 > 0) sc.classes.push_back({r12, ov.f0, 0, {ov.gamma / d1, (1.0 - ov.gamma) / d2}});
    if (r2 > 0) sc.classes.push_back({r2, ov.f0, 0, {0.0, 1.0 / d2}});
    return sc;
}

NoSubScenario NoSubScenario::single_creditor(const MultiMarketParams& markets, double f0) {
    NoSubScenario sc;
    sc.markets = markets;
    sc.creditors = 1;
    const double k = markets.total_size();
    for (int m = 0; m < markets.beta(); ++m) {
        sc.classes.push_back({markets.blocks[m].size, f0, m, {1.0 / k, 0.0}});
    }
    return sc;
}

NoSubScenario NoSubScenario::creditor_per_market(const MultiMarketParams& markets, double f0) {
    if (markets.beta() != 2) throw DomainError("nosub: creditor_per_market needs two blocks");
    NoSubScenario sc;
    sc.markets = markets;
    sc.creditors = 2;
    sc.classes.push_back({markets.blocks[0].size, f0, 0, {1.0 / markets.blocks[0].size, 0.0}});
    sc.classes.push_back({markets.blocks[1].size, f0, 1, {0.0, 1.0 / markets.blocks[1].size}});
    return sc;
}

Alphas alphas(const OverlapSpec& ov) {
    const double d1 = ov.r1 + ov.gamma * ov.r12;
    const double d2 = 1.0 - ov.r1 - ov.gamma * ov.r12;
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw DomainError("alphas: a creditor holds no face value");
    return {(ov.r1 + ov.gamma * ov.gamma * ov.r12) / (d1 * d1),
            ov.gamma * (1.0 - ov.gamma) * ov.r12 / (d1 * d2),
            (1.0 - ov.r1 - ov.gamma * (2.0 - ov.gamma) * ov.r12) / (d2 * d2)};
}

NoSubTerms nosub_terms(double z, std::span<const double> u, const NoSubScenario& scenario) {
    if (static_cast<int>(u.size()) != scenario.markets.beta()) {
        throw DomainError("nosub_terms: one u per market block required");
    }
    return terms_from_keys(z, u, scenario, moment_keys(scenario));
}

Mixture2 nosub_mixture(const NoSubScenario& scenario, const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    if (scenario.creditors != 2) throw DomainError("nosub_mixture: two creditors required");
    const auto keys = moment_keys(scenario);
    require_nonsingular(keys);
    const auto nodes =
        quadrature::product_nodes(scenario.markets.n_fluct, scenario.markets.beta(), quad);
    Mixture2 mix;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto t = terms_from_keys(nodes.z[i], nodes.factors(i), scenario, keys);
        mix.add({nodes.weight[i], t.mean[0], t.mean[1], t.cov[0], t.cov[2], t.cov[1]});
    }
    return mix;
}

Mixture1 nosub_marginal_mixture(int creditor, const NoSubScenario& scenario,
                                const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    if (creditor < 0 || creditor >= scenario.creditors) throw DomainError("nosub: bad creditor");
    const auto keys = moment_keys(scenario);
    const auto nodes =
        quadrature::product_nodes(scenario.markets.n_fluct, scenario.markets.beta(), quad);
    Mixture1 mix;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto t = terms_from_keys(nodes.z[i], nodes.factors(i), scenario, keys);
        mix.add(nodes.weight[i], t.mean[creditor], t.cov[creditor == 0 ? 0 : 2]);
    }
    return mix;
}

double density_nosub(std::span<const double> l, const NoSubScenario& scenario,
                     const quadrature::QuadratureSpec& quad) {
    if (scenario.markets.beta() != 1) {
        throw DomainError("density_nosub: several market blocks; use density_nosub_multimarket");
    }
    return density_nosub_multimarket(l, scenario, quad);
}

double density_nosub_multimarket(std::span<const double> l, const NoSubScenario& scenario,
                                 const quadrature::QuadratureSpec& quad) {
    scenario.validate();
    quad.validate();
    check_losses(l, scenario);
    const int beta = scenario.markets.beta();
    if (beta > quadrature::kMaxTensorFactors) {
        throw UnsupportedDimensionError(
            "nosub: more than 4 market blocks; tensor quadrature refuses, use the Monte Carlo "
            "oracle (mode mc-validate)");
    }
    const auto keys = moment_keys(scenario);
    if (scenario.creditors == 2) require_nonsingular(keys);
    if (quad.mode == quadrature::Mode::adaptive) {
        if (beta == 1) return adaptive_single_market(l, scenario, keys, quad);
        const double n = scenario.markets.n_fluct;
        return quadrature::integrate_chi2(
            [&](double z) {
                return quadrature::integrate_gauss_multi(
                    [&](std::span<const double> u) {
                        return conditional_density(l, terms_from_keys(z, u, scenario, keys),
                                                   scenario.creditors);
                    },
                    beta, n, quad);
            },
            n, quad);
    }
    const auto nodes = quadrature::product_nodes(scenario.markets.n_fluct, beta, quad);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        sum += nodes.weight[i] *
               conditional_density(l, terms_from_keys(nodes.z[i], nodes.factors(i), scenario, keys),
                                   scenario.creditors);
    }
    return sum;
}

double tail_probability_nosub(int creditor, double threshold, const NoSubScenario& scenario,
                              const quadrature::QuadratureSpec& quad) {
    return nosub_marginal_mixture(creditor, scenario, quad).tail(threshold);
}

DensityGrid grid_nosub(const NoSubScenario& scenario, const quadrature::QuadratureSpec& quad,
                       const Axis& ax, const Axis& ay) {
    DensityGrid grid(ax, ay);
    if (quad.mode == quadrature::Mode::adaptive) {
        parallel_for(grid.values.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                const int i = static_cast<int>(k / ay.cells), j = static_cast<int>(k % ay.cells);
                const double l[2] = {ax.center(i), ay.center(j)};
                grid.values[k] = density_nosub_multimarket(l, scenario, quad);
            }
        });
    } else {
        const Mixture2 mix = nosub_mixture(scenario, quad);
        grid.values = mix.grid_density(ax, ay);
        grid.metadata["skipped_node_weight"] = mix.skipped_weight();
    }
    grid.metadata["accuracy_warning"] = scenario.k_obligors() < 8;
    return grid;
}

}  // namespace jointloss
