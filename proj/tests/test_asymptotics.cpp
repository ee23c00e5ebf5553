#include <doctest.h>

#include <cmath>

#include "jointloss/asymptotics/implicit.hpp"
#include "jointloss/asymptotics/limits.hpp"
#include "jointloss/errors.hpp"
#include "jointloss/model/moments.hpp"
#include "oracles.hpp"

using namespace jointloss;

namespace {

const SubordinationSpec kFaces{37.0, 38.0};

double std_phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Root of target = f(u) on [lo, hi] for increasing f, by plain bisection.
template <class F>
double bisect(F&& f, double target, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("implicit solves round-trip") {
    const MarketParams p = MarketParams::empirical();
    for (double z : {0.5, 3.0, 12.0})
        for (double u : {-0.5, 0.0, 0.4}) {
            const double l = plain_mean_loss(z, u, 75.0, p).value;
            const auto r = solve_u_plain(l, z, 75.0, p);
            REQUIRE(r.has_value());
            CHECK(r->root == doctest::Approx(u).epsilon(1e-8));
            CHECK(std::abs(r->residual) < 1e-10);
            const double ls = senior_mean_loss(z, u, kFaces, p).value;
            if (ls > 1e-12) {
                const auto s = solve_u_senior(ls, z, kFaces, p);
                REQUIRE(s.has_value());
                CHECK(s->root == doctest::Approx(u).epsilon(1e-6));
            }
            const double lj = junior_mean_loss(z, u, kFaces, p).value;
            CAPTURE(lj);
            if (lj > 1e-12 && lj < 1.0 - 1e-12) {
                const auto j = solve_u_junior(lj, z, kFaces, p);
                REQUIRE(j.has_value());
                CHECK(j->root == doctest::Approx(u).epsilon(1e-6));
            }
        }
    CHECK_FALSE(solve_u_plain(1.5, 1.0, 75.0, p).has_value());
    MarketParams flat = p;
    flat.c = 0.0;
    CHECK_THROWS_AS(solve_u_plain(0.1, 1.0, 75.0, flat), DomainError);
}

TEST_CASE("the monotone solver rejects decreasing maps") {
    const auto down = [](double u) { return Jet{-u, 0.0, -1.0}; };
    CHECK_THROWS_AS(solve_monotone_u(down, 0.0, -1.0, 1.0), DomainError);
    const auto up = [](double u) { return Jet{u * u * u + u, 0.0, 3 * u * u + 1}; };
    const auto r = solve_monotone_u(up, 0.5, -2.0, 2.0);
    REQUIRE(r.has_value());
    CHECK(r->root * r->root * r->root + r->root == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("z0 scan finds one root on the ridge") {
    const MarketParams p = MarketParams::empirical();
    for (double lj : {0.4, 0.6, 0.8}) {
        const auto scan = scan_z0(0.05, lj, kFaces, p);
        CHECK_FALSE(scan.anomaly());
        for (const auto& root : scan.roots) {
            CHECK(root.senior.value == doctest::Approx(0.05).epsilon(1e-8));
            CHECK(root.junior.value == doctest::Approx(lj).epsilon(1e-8));
        }
    }
}

TEST_CASE("equal-infinite limit density is normalized") {
    const MarketParams p = MarketParams::empirical();
    const double mass = oracle::integrate(
        [&](double l) { return density_limit_equal_infinite(l, 75.0, p); }, 1e-9, 1.0 - 1e-9,
        {0.001, 0.01, 0.05, 0.2}, 1e-8);
    CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("finite-vs-infinite and two-market limits marginalize to the equal limit") {
    const MarketParams p = MarketParams::empirical();
    for (double l2 : {0.03, 0.1}) {
        const double marg = oracle::integrate(
            [&](double l1) { return density_limit_finite_vs_infinite(l1, l2, 10, 75.0, p); }, -1.0,
            2.0, {0.0, l2, 0.3}, 1e-9);
        CHECK(marg == doctest::Approx(density_limit_equal_infinite(l2, 75.0, p)).epsilon(1e-4));
    }
    const double l1 = 0.05;
    const double marg = oracle::integrate(
        [&](double l2) { return density_limit_two_markets(l1, l2, 75.0, p, 75.0, p); }, 1e-9,
        1.0 - 1e-9, {0.001, 0.01, 0.05, 0.2}, 1e-8);
    CHECK(marg == doctest::Approx(density_limit_equal_infinite(l1, 75.0, p)).epsilon(2e-3));
}

TEST_CASE("subordinated limit integrates to the (z, u) measure of a rectangle") {
    const MarketParams p = MarketParams::empirical();
    const double a = 0.001, b = 0.05, c = 0.2, d = 0.6;
    // Probability that (m^S_1, m^S_0 + m^J_1) lands in the rectangle: for each z
    // the admissible u form an interval because both maps increase in u.
    const double r = 12.0 / std::sqrt(p.n_fluct);
    const auto ms = [&](double z, double u) { return senior_mean_loss(z, u, kFaces, p).value; };
    const auto mj = [&](double z, double u) { return junior_mean_loss(z, u, kFaces, p).value; };
    const double ref = oracle::integrate(
        [&](double z) {
            const auto us = [&](double l) { return bisect([&](double u) { return ms(z, u); }, l, -r, r); };
            const auto uj = [&](double l) { return bisect([&](double u) { return mj(z, u); }, l, -r, r); };
            const double lo = std::max(us(a), uj(c)), hi = std::min(us(b), uj(d));
            if (!(hi > lo)) return 0.0;
            const double s = std::sqrt(p.n_fluct);
            return oracle::chi2_pdf(z, p.n_fluct) * (std_phi(hi * s) - std_phi(lo * s));
        },
        1e-6, 80.0, {1.0, 3.0, 6.0, 12.0, 25.0}, 1e-7);
    // Midpoint rule on a fine grid of the limit density.
    const int n = 120;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double ls = a + (b - a) * (i + 0.5) / n, lj = c + (d - c) * (j + 0.5) / n;
            sum += density_limit_subordinated(ls, lj, kFaces, p).density;
        }
    sum *= (b - a) * (d - c) / (n * n);
    CHECK(ref > 0.02);
    CHECK(sum == doctest::Approx(ref).epsilon(1e-2));
}

TEST_CASE("limit modes need c > 0") {
    MarketParams p = MarketParams::empirical();
    p.c = 0.0;
    CHECK_THROWS_AS(density_limit_equal_infinite(0.1, 75.0, p), DomainError);
}

}  // TEST_SUITE
