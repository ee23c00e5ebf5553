#include <doctest.h>

#include <cmath>
#include <random>

#include "jointloss/errors.hpp"
#include "jointloss/loss/bivariate_normal.hpp"
#include "jointloss/loss/correlation.hpp"
#include "jointloss/loss/mixture.hpp"
#include "jointloss/loss/no_default.hpp"
#include "jointloss/loss/nosub.hpp"
#include "jointloss/loss/subordinated.hpp"
#include "jointloss/model/moments.hpp"
#include "jointloss/model/normal.hpp"
#include "oracles.hpp"

using namespace jointloss;

namespace {

const SubordinationSpec kFaces{37.0, 38.0};

double std_phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_SUITE("loss") {

TEST_CASE("bivariate normal special cases") {
    for (double r : {-0.95, -0.5, 0.0, 0.3, 0.9})
        CHECK(bvn_cdf(0.0, 0.0, r) == doctest::Approx(0.25 + std::asin(r) / (2 * M_PI)).epsilon(1e-14));
    for (double x : {-2.0, 0.3, 1.5})
        for (double y : {-1.0, 0.0, 2.5}) {
            CHECK(bvn_cdf(x, y, 0.0) == doctest::Approx(std_phi(x) * std_phi(y)).epsilon(1e-14));
            CHECK(bvn_cdf(x, y, 1.0) == doctest::Approx(std_phi(std::min(x, y))).epsilon(1e-14));
            CHECK(bvn_cdf(x, y, -1.0) ==
                  doctest::Approx(std::max(0.0, std_phi(x) + std_phi(y) - 1.0)).epsilon(1e-14));
            CHECK(bvn_cdf(x, y, 0.6) == doctest::Approx(bvn_cdf(y, x, 0.6)).epsilon(1e-15));
        }
    // Brute-force check: d/dy of the cdf integrated along x.
    const double x = 0.7, y = -0.4, r = 0.55;
    const double ref = oracle::integrate(
        [&](double t) {
            return std::exp(-0.5 * t * t) / std::sqrt(2 * M_PI) *
                   std_phi((y - r * t) / std::sqrt(1 - r * r));
        },
        -40.0, x, {0.0});
    CHECK(bvn_cdf(x, y, r) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("mixture masses, marginals and tails") {
    Mixture2 mix;
    mix.add({0.6, 0.2, 0.3, 0.01, 0.02, 0.005});
    mix.add({0.4, 0.5, 0.4, 0.03, 0.01, -0.004});
    mix.add({0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    CHECK(mix.size() == 2u);
    CHECK(mix.rectangle(-10, 10, -10, 10) == doctest::Approx(1.0).epsilon(1e-13));
    const Axis ax{"x", 0.0, 1.0, 20};
    double total = 0.0;
    for (double m : mix.cell_masses(ax, ax)) total += m;
    CHECK(total == doctest::Approx(mix.rectangle(0, 1, 0, 1)).epsilon(1e-12));
    CHECK(mix.tail(0, 0.35) ==
          doctest::Approx(0.6 * (1 - std_phi(0.15 / 0.1)) + 0.4 * (1 - std_phi(-0.15 / std::sqrt(0.03))))
              .epsilon(1e-13));
    const double marg = oracle::integrate([&](double y) { return mix.density(0.3, y); }, -3.0, 4.0,
                                          {0.3, 0.4});
    CHECK(mix.marginal_density(0, 0.3) == doctest::Approx(marg).epsilon(1e-10));
    // Degenerate component: skipped and its weight tracked.
    Mixture2 bad;
    bad.add({0.25, 0.1, 0.1, 0.01, 0.01, 0.01});
    CHECK(bad.size() == 0u);
    CHECK(bad.skipped_weight() == doctest::Approx(0.25));
}

TEST_CASE("subordinated Gaussian terms match per-obligor brute force") {
    const MarketParams p = MarketParams::empirical();
    const int k = 200;
    const SubordinatedScenario sc{k, kFaces, p};
    for (double z : {1.0, 4.0, 10.0})
        for (double u : {-0.3, 0.2, 0.6}) {
            const auto m = oracle::tranche_moments(z, u, kFaces, p);
            const auto t = gaussian_moment_terms(z, u, sc);
            CHECK(t.m1s == doctest::Approx(m.es).epsilon(1e-8));
            CHECK(t.m2s == doctest::Approx((m.es2 - m.es * m.es) / k).epsilon(1e-8));
            CHECK(t.m1j == doctest::Approx(m.ej).epsilon(1e-8));
            CHECK(t.m2j == doctest::Approx((m.ej2 - m.ej * m.ej) / k).epsilon(1e-8));
            CHECK(t.ns == doctest::Approx((m.esj - m.es * m.ej) / k).epsilon(1e-8));
            CHECK(t.conditional_variance() >= 0.0);
        }
}

TEST_CASE("no-subordination terms equal explicit class sums") {
    const MarketParams p = MarketParams::empirical();
    const OverlapSpec ov{0.3, 0.4, 0.25, 75.0};
    const int k = 20;
    const auto sc = NoSubScenario::overlap(ov, k, p);
    const int r1 = 6, r12 = 8, r2 = 6;
    const double d1 = r1 + ov.gamma * r12, d2 = r2 + (1 - ov.gamma) * r12;
    const double z = 3.0, u[1] = {0.25};
    const double m1 = oracle::plain_moment(1, z, u[0], 75.0, p);
    const double var = oracle::plain_moment(2, z, u[0], 75.0, p) - m1 * m1;
    // Per-obligor weights of each creditor.
    std::vector<std::array<double, 2>> w;
    for (int i = 0; i < r1; ++i) w.push_back({1 / d1, 0});
    for (int i = 0; i < r12; ++i) w.push_back({ov.gamma / d1, (1 - ov.gamma) / d2});
    for (int i = 0; i < r2; ++i) w.push_back({0, 1 / d2});
    double mean[2] = {}, cov[3] = {};
    for (const auto& x : w) {
        mean[0] += x[0] * m1;
        mean[1] += x[1] * m1;
        cov[0] += x[0] * x[0] * var;
        cov[1] += x[0] * x[1] * var;
        cov[2] += x[1] * x[1] * var;
    }
    const auto t = nosub_terms(z, u, sc);
    CHECK(t.mean[0] == doctest::Approx(mean[0]).epsilon(1e-8));
    CHECK(t.mean[1] == doctest::Approx(mean[1]).epsilon(1e-8));
    for (int i = 0; i < 3; ++i) CHECK(t.cov[i] == doctest::Approx(cov[i]).epsilon(1e-8));
    // The same covariance through the alpha matrix: alpha * var / K.
    const Alphas a = alphas(ov);
    CHECK(cov[0] == doctest::Approx(a.a1 * var / k).epsilon(1e-12));
    CHECK(cov[1] == doctest::Approx(a.a12 * var / k).epsilon(1e-12));
    CHECK(cov[2] == doctest::Approx(a.a2 * var / k).epsilon(1e-12));
}

TEST_CASE("no-subordination scenarios reject bad input") {
    const MarketParams p = MarketParams::empirical();
    CHECK_THROWS_AS(NoSubScenario::overlap({0.8, 0.4, 0.5, 75.0}, 100, p), DomainError);
    CHECK_THROWS_AS(NoSubScenario::overlap({0.33, 0.0, 0.5, 75.0}, 10, p), DomainError);
    // Identical portfolios: the conditional covariance is singular.
    const auto same = NoSubScenario::overlap({0.0, 1.0, 0.5, 75.0}, 10, p);
    CHECK_THROWS_AS(nosub_mixture(same, {}), SingularCovarianceError);
    MultiMarketParams mm;
    mm.n_fluct = 6.0;
    for (int i = 0; i < 6; ++i) mm.blocks.push_back({p, 5});
    const auto six = NoSubScenario::single_creditor(mm, 75.0);
    const double l[1] = {0.1};
    CHECK_THROWS_AS(density_nosub_multimarket(l, six, {}), UnsupportedDimensionError);
}

TEST_CASE("analytic densities are normalized mixtures") {
    const MarketParams p = MarketParams::empirical();
    const auto sc = NoSubScenario::overlap({0.5, 0.0, 0.5, 75.0}, 100, p);
    const Mixture2 mix = nosub_mixture(sc, {});
    CHECK(mix.weight() + mix.skipped_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mix.rectangle(-5, 5, -5, 5) + mix.skipped_weight() == doctest::Approx(1.0).epsilon(1e-10));
    const SubordinatedScenario sub{200, kFaces, p};
    const Mixture2 smix = subordinated_mixture(sub, {});
    CHECK(smix.rectangle(-5, 5, -5, 5) + smix.skipped_weight() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fixed and adaptive quadrature agree on interior densities") {
    const MarketParams p = MarketParams::empirical();
    const SubordinatedScenario sub{200, kFaces, p};
    quadrature::QuadratureSpec adaptive;
    adaptive.mode = quadrature::Mode::adaptive;
    adaptive.rel_tol = 1e-7;
    for (auto [ls, lj] : {std::pair{0.05, 0.6}, std::pair{0.2, 0.9}}) {
        const double a = density_subordinated(ls, lj, sub, {});
        const double b = density_subordinated(ls, lj, sub, adaptive);
        CAPTURE(ls);
        CHECK(a == doctest::Approx(b).epsilon(2e-3));
    }
    const auto sc = NoSubScenario::overlap({0.5, 0.0, 0.5, 75.0}, 100, p);
    const double l[2] = {0.1, 0.12};
    CHECK(density_nosub(l, sc, {}) == doctest::Approx(density_nosub(l, sc, adaptive)).epsilon(2e-3));
}

TEST_CASE("no-default probability matches a nested brute-force integral") {
    const MarketParams p = MarketParams::empirical();
    for (int k : {1, 10, 50}) {
        const auto survive = [&](double z, double u) {
            const oracle::Conditional law(z, u, p);
            const double m0 = std_phi((law.threshold(75.0) - law.mean) / law.sd);
            return std::pow(1.0 - m0, k);
        };
        const double ref = oracle::expect_zu(survive, p.n_fluct, 1e-11);
        CHECK(no_default_probability(k, 75.0, p, {}) == doctest::Approx(ref).epsilon(1e-6));
    }
    double prev = 1.0;
    for (int k : {1, 2, 5, 10, 50, 100}) {
        const double v = no_default_probability(k, 75.0, p, {});
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("moment-route correlation matches a brute-force law of total covariance") {
    MarketParams p = MarketParams::empirical();
    p.c = 0.1;
    const int k = 10;
    const auto sc = NoSubScenario::overlap({0.5, 0.0, 0.5, 75.0}, k, p);
    // Disjoint halves of 5: E[L1 L2] = E[m1^2]; Var L = E[m1^2] + E[var]/5.
    const auto m1 = [&](double z, double u) { return oracle::plain_mean(z, u, 75.0, p); };
    const double e1 = oracle::expect_zu(m1, p.n_fluct);
    const double e11 = oracle::expect_zu([&](double z, double u) { return m1(z, u) * m1(z, u); },
                                         p.n_fluct);
    const double e2 = oracle::expect_zu(
        [&](double z, double u) { return moment_plain(2, z, u, 75.0, p); }, p.n_fluct);
    const double cov = e11 - e1 * e1;
    const double var = cov + (e2 - e11) / 5.0;
    CHECK(correlation_from_moments(sc, {}) == doctest::Approx(cov / var).epsilon(1e-6));
}

}  // TEST_SUITE
