#include <doctest.h>

#include <cmath>

#include "jointloss/errors.hpp"
#include "jointloss/quadrature/adaptive.hpp"
#include "jointloss/quadrature/integrate.hpp"
#include "jointloss/quadrature/rules.hpp"
#include "oracles.hpp"

using namespace jointloss;
using namespace jointloss::quadrature;

TEST_SUITE("quadrature") {

TEST_CASE("rules are normalized and reproduce low moments") {
    for (int n : {8, 32, 128}) {
        const Rule chi = chi_squared_rule(n, 6.0);
        const Rule gau = common_factor_rule(n, 6.0);
        double s = 0, m1 = 0, m2 = 0, g0 = 0, g2 = 0, g4 = 0;
        for (std::size_t i = 0; i < chi.size(); ++i) {
            s += chi.weights[i];
            m1 += chi.weights[i] * chi.nodes[i];
            m2 += chi.weights[i] * chi.nodes[i] * chi.nodes[i];
        }
        for (std::size_t i = 0; i < gau.size(); ++i) {
            const double u = gau.nodes[i];
            g0 += gau.weights[i];
            g2 += gau.weights[i] * u * u;
            g4 += gau.weights[i] * u * u * u * u;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(m1 == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(m2 == doctest::Approx(48.0).epsilon(1e-12));  // N(N + 2)
        CHECK(g0 == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(g2 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
        CHECK(g4 == doctest::Approx(3.0 / 36.0).epsilon(1e-12));
    }
}

TEST_CASE("chi-squared expectation of a smooth function matches a brute-force integral") {
    const auto f = [](double z) { return std::exp(-0.3 * z) * std::sqrt(z); };
    const double ref =
        oracle::integrate([&](double z) { return oracle::chi2_pdf(z, 6.0) * f(z); }, 0.0, 400.0,
                          {2.0, 6.0, 20.0});
    QuadratureSpec fixed;
    QuadratureSpec adaptive;
    adaptive.mode = Mode::adaptive;
    adaptive.rel_tol = 1e-9;
    // sqrt(z) factors limit the fixed rule to algebraic convergence.
    CHECK(integrate_chi2(f, 6.0, fixed) == doctest::Approx(ref).epsilon(1e-7));
    double prev = 1.0;
    for (int n : {32, 64, 128, 256}) {
        QuadratureSpec q;
        q.z_nodes = n;
        const double err = std::abs(integrate_chi2(f, 6.0, q) / ref - 1.0);
        CHECK(err < prev / 4.0);
        prev = err;
    }
    CHECK(integrate_chi2(f, 6.0, adaptive) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(chi_squared_density(3.0, 6.0) == doctest::Approx(oracle::chi2_pdf(3.0, 6.0)).epsilon(1e-14));
}

TEST_CASE("gauss expectations and tensor products") {
    QuadratureSpec spec;
    const auto g = [](double u) { return std::cos(u); };
    // E[cos u] = exp(-1/(2N)).
    CHECK(integrate_gauss(g, 6.0, spec) == doctest::Approx(std::exp(-1.0 / 12.0)).epsilon(1e-13));
    spec.mode = Mode::adaptive;
    spec.rel_tol = 1e-10;
    CHECK(integrate_gauss(g, 6.0, spec) == doctest::Approx(std::exp(-1.0 / 12.0)).epsilon(1e-9));
    QuadratureSpec fixed;
    fixed.u_nodes = 16;
    for (int beta = 1; beta <= 4; ++beta) {
        const double v = integrate_gauss_multi(
            [](std::span<const double> u) {
                double s = 0.0;
                for (double x : u) s += x * x;
                return s;
            },
            beta, 6.0, fixed);
        CHECK(v == doctest::Approx(beta / 6.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(integrate_gauss_multi([](std::span<const double>) { return 1.0; }, 5, 6.0, fixed),
                    UnsupportedDimensionError);
}

TEST_CASE("product nodes carry unit weight") {
    QuadratureSpec spec;
    spec.z_nodes = 16;
    spec.u_nodes = 12;
    const auto nodes = product_nodes(6.0, 2, spec);
    CHECK(nodes.size() == 16u * 12u * 12u);
    double w = 0.0, ez = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        w += nodes.weight[i];
        ez += nodes.weight[i] * nodes.z[i];
    }
    CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ez == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("adaptive integrator handles kinks and reports failure") {
    AdaptiveOptions opt;
    opt.rel_tol = 1e-12;
    const double kink = 0.3;
    const auto r = integrate_adaptive([&](double x) { return std::abs(x - kink); }, 0.0, 1.0, opt,
                                      std::span<const double>(&kink, 1));
    CHECK(r.value == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-13));
    AdaptiveOptions tight;
    tight.rel_tol = 1e-15;
    tight.max_intervals = 3;
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x + 1e-12); }, 0.0, 1.0, tight),
                    ConvergenceError);
}

TEST_CASE("spec validation") {
    QuadratureSpec s;
    s.z_nodes = 4;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = {};
    s.rel_tol = 0.1;
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK(factor_range(4.0) == doctest::Approx(6.0));
    CHECK(chi_squared_upper(6.0) > 50.0);
}

}  // TEST_SUITE
