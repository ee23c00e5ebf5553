#include <doctest.h>

#include <cmath>

#include "jointloss/calibration/bessel.hpp"
#include "jointloss/calibration/fit.hpp"
#include "jointloss/calibration/return_density.hpp"
#include "jointloss/errors.hpp"
#include "jointloss/mc/samplers.hpp"
#include "oracles.hpp"

using namespace jointloss;

namespace {

// K_nu(x) from its integral representation.
double bessel_k_integral(double nu, double x) {
    return oracle::integrate([&](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); },
                             0.0, 40.0, {1.0, 3.0, 8.0}, 1e-14);
}

Eigen::MatrixXd one_factor(int k, double c) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(k, k, c);
    s.diagonal().setOnes();
    return s;
}

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("log Bessel K against its integral and its asymptotes") {
    for (double nu : {-3.5, -0.5, 0.0, 1.0, 2.5, 7.0})
        for (double x : {0.05, 0.7, 3.0, 20.0}) {
            CAPTURE(nu);
            CAPTURE(x);
            CHECK(log_bessel_k(nu, x) == doctest::Approx(std::log(bessel_k_integral(nu, x))).epsilon(1e-10));
        }
    // Large argument: K_nu(x) ~ sqrt(pi/2x) e^-x.
    const double x = 5000.0;
    CHECK(log_bessel_k(1.5, x) == doctest::Approx(-x + 0.5 * std::log(M_PI / (2 * x))).epsilon(1e-6));
    // Small argument, large order: K_nu(x) ~ Gamma(nu) 2^(nu-1) x^-nu, beyond double range.
    const double nu = 200.0, y = 1e-3;
    CHECK(log_bessel_k(nu, y) ==
          doctest::Approx(std::lgamma(nu) + (nu - 1) * std::log(2.0) - nu * std::log(y)).epsilon(1e-6));
    CHECK(log_bessel_k(-nu, y) == doctest::Approx(log_bessel_k(nu, y)).epsilon(1e-12));
}

TEST_CASE("return density is normalized") {
    for (double n : {2.5, 6.0, 30.0}) {
        Eigen::MatrixXd s1(1, 1);
        s1(0, 0) = 0.04;
        const double mass1 = oracle::integrate(
            [&](double r) { return return_density(Eigen::VectorXd::Constant(1, r), s1, n); }, -5.0,
            5.0, {-0.5, -1e-9, 1e-9, 0.5}, 1e-10);
        CHECK(mass1 == doctest::Approx(1.0).epsilon(1e-6));
        // K = 2 with identity Sigma: integrate over the radius.
        const Eigen::MatrixXd s2 = Eigen::MatrixXd::Identity(2, 2);
        const double mass2 = oracle::integrate(
            [&](double r) {
                Eigen::VectorXd v(2);
                v << r, 0.0;
                return 2 * M_PI * r * return_density(v, s2, n);
            },
            0.0, 200.0, {1.0, 5.0, 20.0}, 1e-10);
        CHECK(mass2 == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("return density limits") {
    // q -> 0 is continuous for N > K.
    const double ld = std::log(2 * M_PI);
    CHECK(log_return_density_q(0.0, 1, ld, 6.0) ==
          doctest::Approx(log_return_density_q(1e-14, 1, ld, 6.0)).epsilon(1e-6));
    CHECK(std::isinf(log_return_density_q(0.0, 8, 8 * ld, 6.0)));
    // Large N approaches the Gaussian.
    Eigen::MatrixXd s = one_factor(3, 0.3);
    Eigen::VectorXd r(3);
    r << 0.4, -0.2, 1.1;
    const double q = r.dot(s.llt().solve(r));
    const double gauss = -0.5 * q - 0.5 * std::log((2 * M_PI * s).determinant());
    CHECK(log_return_density(r, s, 1e6) == doctest::Approx(gauss).epsilon(1e-4));
    CHECK_THROWS_AS(log_return_density(r, -s, 6.0), DomainError);
}

TEST_CASE("effective correlation and sample covariance") {
    CHECK(effective_correlation(one_factor(5, 0.28)) == doctest::Approx(0.28).epsilon(1e-14));
    CHECK_THROWS_AS(effective_correlation(Eigen::MatrixXd::Ones(1, 1)), DomainError);
    ReturnSample s;
    s.returns.resize(3, 1);
    s.returns << 1.0, 2.0, 6.0;
    CHECK(s.covariance()(0, 0) == doctest::Approx(7.0));
}

TEST_CASE("fit recovers N from synthetic compound returns") {
    MarketParams p = MarketParams::empirical();
    const auto v = mc::sample_compound(MultiMarketParams::single(p, 10), 3000, 21);
    ReturnSample s;
    s.returns = (v.array() / p.v0).log().matrix();
    const FitResult fit = fit_n(s);
    CHECK(fit.converged);
    CHECK_FALSE(fit.boundary);
    CHECK(fit.n_hat > 4.5);
    CHECK(fit.n_hat < 8.0);
    CHECK(fit.rank == 10);
}

TEST_CASE("Gaussian returns push the fit to the upper boundary") {
    MarketParams p = MarketParams::empirical();
    p.n_fluct = 1e7;
    const auto v = mc::sample_compound(MultiMarketParams::single(p, 5), 3000, 4);
    ReturnSample s;
    s.returns = (v.array() / p.v0).log().matrix();
    const FitResult fit = fit_n(s);
    CHECK(fit.n_hat > 100.0);
}

TEST_CASE("rank-deficient samples use the pseudo-inverse") {
    MarketParams p = MarketParams::empirical();
    const auto v = mc::sample_compound(MultiMarketParams::single(p, 4), 2000, 8);
    ReturnSample s;
    s.returns.resize(2000, 5);
    s.returns.leftCols(4) = (v.array() / p.v0).log().matrix();
    s.returns.col(4) = s.returns.col(0) + s.returns.col(1);
    const FitResult fit = fit_n(s);
    CHECK(fit.pseudo_inverse);
    CHECK(fit.rank == 4);
    CHECK(fit.n_hat > 3.5);
    CHECK(fit.n_hat < 9.0);
    ReturnSample flat;
    flat.returns = Eigen::MatrixXd::Ones(10, 3);
    CHECK_THROWS_AS(fit_n(flat), DomainError);
}

}  // TEST_SUITE
