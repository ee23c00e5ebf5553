#pragma once
// Independent brute-force references for the tests. Nothing here calls the
// library's own quadrature or closed forms.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "jointloss/model/market.hpp"
#include "jointloss/model/moments.hpp"

namespace oracle {

using jointloss::MarketParams;
using jointloss::SubordinationSpec;
using jointloss::Tranche;

// Adaptive Gauss-Kronrod over [a, b] split at the given interior points.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> cuts = {}, double tol = 1e-14) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (!(hi > lo)) continue;
        sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, tol);
    }
    return sum;
}

// Law of the rescaled log asset value given (z, u).
struct Conditional {
    double mean, sd, drift, sqrt_z, v0;

    Conditional(double z, double u, const MarketParams& p)
        : mean(-std::sqrt(p.c * p.t_mat) * p.rho * u),
          sd(std::sqrt((1.0 - p.c) * p.t_mat * p.rho * p.rho / p.n_fluct)),
          drift((p.mu - 0.5 * p.rho * p.rho) * p.t_mat),
          sqrt_z(std::sqrt(z)),
          v0(p.v0) {}

    double pdf(double x) const {
        const double d = (x - mean) / sd;
        return std::exp(-0.5 * d * d) / (sd * std::sqrt(2.0 * M_PI));
    }
    double asset(double x) const { return v0 * std::exp(drift + sqrt_z * x); }
    double threshold(double face) const { return (std::log(face / v0) - drift) / sqrt_z; }

    // E[g(V) 1{lo_face <= V < face}] with the Gaussian weight written out;
    // lo_face = 0 means no lower bound.
    double expect_band(double lo_face, double face, const std::function<double(double)>& g) const {
        const double hi = threshold(face);
        const double lo = lo_face > 0.0 ? threshold(lo_face) : std::min(mean, hi) - 40.0 * sd;
        std::vector<double> cuts;
        for (double k : {-6.0, -2.0, 0.0, 2.0, 6.0}) cuts.push_back(mean + k * sd);
        for (double k : {-6.0, -2.0}) cuts.push_back(hi + k * sd);
        return integrate([&](double x) { return pdf(x) * g(asset(x)); }, lo, hi, cuts);
    }
    double expect_below(double face, const std::function<double(double)>& g) const {
        return expect_band(0.0, face, g);
    }
};

// The defining integral of tau^{iota,lambda}_j (negative Gaussian exponent).
inline double tau(int j, Tranche iota, Tranche lambda, double z, double u,
                  const SubordinationSpec& f, const MarketParams& p) {
    const double total = f.f_senior + f.f_junior;
    const double f_iota = iota == Tranche::senior ? f.f_senior : f.f_junior;
    const double c_iota = iota == Tranche::senior ? 1.0 : total / f.f_junior;
    const double f_lambda = lambda == Tranche::senior ? f.f_senior : total;
    const Conditional law(z, u, p);
    return law.expect_below(f_lambda, [&](double v) { return std::pow(c_iota - v / f_iota, j); });
}

// Per-obligor conditional moments of the tranche losses, from the loss
// functions themselves.
struct TrancheMoments {
    double es, es2, ej, ej2, esj;
};

inline TrancheMoments tranche_moments(double z, double u, const SubordinationSpec& f,
                                      const MarketParams& p) {
    const Conditional law(z, u, p);
    const double fs = f.f_senior, total = f.f_senior + f.f_junior;
    const auto senior = [&](double v) { return v < fs ? 1.0 - v / fs : 0.0; };
    const auto junior = [&](double v) {
        if (v < fs) return 1.0;
        return v < total ? 1.0 - (v - fs) / f.f_junior : 0.0;
    };
    TrancheMoments m{};
    m.es = law.expect_below(fs, senior);
    m.es2 = law.expect_below(fs, [&](double v) { return senior(v) * senior(v); });
    m.esj = law.expect_below(fs, [&](double v) { return senior(v) * junior(v); });
    // The junior band [F^S, F) is integrated on its own: the loss jumps at F^S.
    const double below = law.expect_below(fs, [](double) { return 1.0; });
    m.ej = below + law.expect_band(fs, total, junior);
    m.ej2 = below + law.expect_band(fs, total, [&](double v) { return junior(v) * junior(v); });
    return m;
}

// E[(1 - V/F)^j 1{V < F}].
inline double plain_moment(int j, double z, double u, double face, const MarketParams& p) {
    const Conditional law(z, u, p);
    return law.expect_below(face, [&](double v) { return std::pow(1.0 - v / face, j); });
}

// E[(1 - V/F) 1{V < F}] from the lognormal partial expectation.
inline double plain_mean(double z, double u, double face, const MarketParams& p) {
    const Conditional law(z, u, p);
    const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double t = (law.threshold(face) - law.mean) / law.sd;
    const double s = law.sqrt_z * law.sd;
    const double a = std::exp(law.drift + law.sqrt_z * law.mean + 0.5 * s * s) * p.v0 / face;
    return cdf(t) - a * cdf(t - s);
}

// Chi-squared density written out.
inline double chi2_pdf(double z, double n) {
    return std::exp((0.5 * n - 1.0) * std::log(z) - 0.5 * z - 0.5 * n * std::log(2.0) -
                    std::lgamma(0.5 * n));
}

// E over z ~ chi2_N and u ~ N(0, 1/N) of g(z, u), by nested Gauss-Kronrod.
inline double expect_zu(const std::function<double(double, double)>& g, double n, double tol = 1e-10) {
    const double su = 1.0 / std::sqrt(n);
    const auto inner = [&](double z) {
        return integrate(
            [&](double u) {
                return std::exp(-0.5 * u * u / (su * su)) / (su * std::sqrt(2.0 * M_PI)) * g(z, u);
            },
            -12.0 * su, 12.0 * su, {-4.0 * su, -1.5 * su, 0.0, 1.5 * su, 4.0 * su}, tol);
    };
    const double zmax = n + 60.0 * std::sqrt(2.0 * n) + 60.0;
    return integrate([&](double z) { return chi2_pdf(z, n) * inner(z); }, 0.0, zmax,
                     {0.5 * n, n, 2.0 * n, 4.0 * n}, tol);
}

}  // namespace oracle
