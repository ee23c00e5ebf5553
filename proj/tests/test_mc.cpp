#include <doctest.h>

#include <cmath>
#include <random>

#include "jointloss/errors.hpp"
#include "jointloss/loss/nosub.hpp"
#include "jointloss/mc/agreement.hpp"
#include "jointloss/mc/estimate.hpp"
#include "jointloss/mc/losses.hpp"
#include "jointloss/mc/samplers.hpp"
#include "jointloss/mc/stats.hpp"
#include "jointloss/parallel.hpp"
#include "oracles.hpp"

using namespace jointloss;
using namespace jointloss::mc;

namespace {

const SubordinationSpec kFaces{37.0, 38.0};

McProblem sub_problem(int k) {
    return {MultiMarketParams::single(MarketParams::empirical(), k),
            LossStructure::subordinated(kFaces, k)};
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("obligor losses") {
    CHECK(obligor_loss(80.0, kFaces).senior == 0.0);
    CHECK(obligor_loss(80.0, kFaces).junior == 0.0);
    CHECK(obligor_loss(18.5, kFaces).senior == doctest::Approx(0.5));
    CHECK(obligor_loss(18.5, kFaces).junior == 1.0);
    CHECK(obligor_loss(56.0, kFaces).senior == 0.0);
    CHECK(obligor_loss(56.0, kFaces).junior == doctest::Approx(0.5));
    CHECK(obligor_loss(50.0, 100.0) == doctest::Approx(0.5));
    CHECK(obligor_loss(100.0, 100.0) == 0.0);
}

TEST_CASE("senior loss never exceeds junior loss (property)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0.0, 120.0);
    const auto st = LossStructure::subordinated(kFaces, 7);
    std::vector<double> vals(7);
    for (int i = 0; i < 20000; ++i) {
        for (double& x : vals) x = v(rng);
        const auto pl = evaluate_losses(vals, st);
        CHECK(pl.loss[0] <= pl.loss[1]);
        CHECK(pl.ordering_violations == 0);
    }
}

TEST_CASE("estimates are identical for any worker count") {
    McConfig cfg;
    cfg.n_samples = 40000;
    cfg.tail_thresholds = {0.1, 0.5};
    const int saved = worker_count();
    set_worker_count(1);
    const McRun a = estimate(sub_problem(20), cfg);
    set_worker_count(3);
    const McRun b = estimate(sub_problem(20), cfg);
    set_worker_count(saved);
    CHECK(a.summary().dump() == b.summary().dump());
    CHECK(a.histogram_all == b.histogram_all);
    CHECK(a.histogram_continuous == b.histogram_continuous);
    cfg.rng_seed += 1;
    const McRun c = estimate(sub_problem(20), cfg);
    CHECK(c.creditor[0].mean.value != a.creditor[0].mean.value);
}

TEST_CASE("MC mean loss matches the analytic expectation") {
    const MarketParams p = MarketParams::empirical();
    const double expected = oracle::expect_zu(
        [&](double z, double u) { return oracle::plain_mean(z, u, 75.0, p); }, p.n_fluct, 1e-8);
    const auto mm = MultiMarketParams::single(p, 10);
    const auto sc = NoSubScenario::single_creditor(mm, 75.0);
    McConfig cfg;
    cfg.n_samples = 200000;
    const McRun run = estimate({mm, LossStructure::nosub(sc)}, cfg);
    CHECK(std::abs(run.creditor[0].mean.value - expected) < 4.0 * run.creditor[0].mean.se);
    cfg.antithetic = true;
    const McRun anti = estimate({mm, LossStructure::nosub(sc)}, cfg);
    CHECK(std::abs(anti.creditor[0].mean.value - expected) < 4.0 * anti.creditor[0].mean.se);
}

TEST_CASE("samplers reproduce the mean covariance and the compound kurtosis") {
    MarketParams p = MarketParams::empirical();
    const auto mm = MultiMarketParams::single(p, 3);
    const Eigen::MatrixXd sigma = mean_covariance(mm);
    const int n = 200000;
    for (auto sampler : {0, 1}) {
        const Eigen::MatrixXd v = sampler == 0 ? sample_compound(mm, n, 5) : sample_wishart(mm, n, 5);
        Eigen::MatrixXd x = (v.array() / p.v0).log().matrix();
        x.rowwise() -= x.colwise().mean();
        const Eigen::MatrixXd cov = x.transpose() * x / (n - 1);
        CAPTURE(sampler);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(cov(i, j) - sigma(i, j)) < 0.04 * sigma(0, 0));
        std::vector<double> col(x.col(0).data(), x.col(0).data() + n);
        // A chi-squared variance mixture has kurtosis 3 (N + 2)/N.
        CHECK(sample_moments(col).kurtosis == doctest::Approx(3.0 * 8.0 / 6.0).epsilon(0.1));
    }
    p.n_fluct = 6.5;
    CHECK_THROWS_AS(WishartSampler(MultiMarketParams::single(p, 3)), SamplerLimitError);
    CHECK_THROWS_AS(WishartSampler(MultiMarketParams::single(MarketParams::empirical(), 600)),
                    SamplerLimitError);
}

TEST_CASE("Kolmogorov-Smirnov test") {
    CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
    CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(0.02));
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    std::vector<double> a(5000), b(5000), c(5000);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    for (auto& x : c) x = g(rng) + 0.2;
    CHECK(ks_two_sample(a, b).p_value > 0.01);
    CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("agreement report") {
    const std::vector<double> mass{0.1, 0.2, 0.3, 0.4};
    const std::vector<std::int64_t> exact{1000, 2000, 3000, 4000};
    const auto ok = compare_cells(mass, exact, 10000, 0.25);
    CHECK(ok.pass());
    CHECK(ok.compared == 4);
    CHECK(ok.max_z == doctest::Approx(0.0));
    const std::vector<std::int64_t> off{1300, 1700, 3000, 4000};
    const auto bad = compare_cells(mass, off, 10000, 0.25);
    CHECK_FALSE(bad.pass());
    CHECK(bad.worst.front().z > 3.0);
    const bool mask[4] = {false, false, true, true};
    CHECK(compare_cells(mass, off, 10000, 0.25, 1e-3, 3.0, std::span<const bool>(mask, 4)).pass());
}

}  // TEST_SUITE
