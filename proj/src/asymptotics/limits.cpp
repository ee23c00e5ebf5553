#include "jointloss/asymptotics/limits.hpp"

#include <cmath>

#include "jointloss/errors.hpp"
#include "jointloss/model/normal.hpp"
#include "jointloss/parallel.hpp"
#include "jointloss/quadrature/adaptive.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss {

namespace {

constexpr double kSingular = 1e-14;

void require_factor(const MarketParams& p) {
    p.validate();
    if (!(p.c > 0.0)) throw DomainError("limit density: requires c > 0");
}

// int_{z_lo}^{z_hi} chi2_N(z) f(z) dz over t = ln z
double integrate_z(const std::function<double(double)>& f, double n_fluct) {
    const double lo = std::log(z_lower());
    const double hi = std::log(z_upper(n_fluct));
    quadrature::AdaptiveOptions opts;
    opts.rel_tol = 1e-8;
    opts.abs_tol = 1e-13;
    opts.initial_pieces = 32;
    opts.max_intervals = 8000;
    auto g = [&](double t) {
        const double z = std::exp(t);
        const double v = f(z);
        return v == 0.0 ? 0.0 : z * quadrature::chi_squared_density(z, n_fluct) * v;
    };
    return quadrature::integrate_adaptive(g, lo, hi, opts).value;
}

std::optional<ImplicitSolve> plain_root(double l, double z, double face, const MarketParams& p) {
    const double r = u_bracket(p);
    return invert_increasing([&](double u) { return plain_mean_loss(z, u, face, p); }, l, -r, r);
}

}  // namespace

LimitValue density_limit_subordinated(double ls, double lj, const SubordinationSpec& spec,
                                      const MarketParams& params) {
    require_factor(params);
    const ZeroScan scan = scan_z0(ls, lj, spec, params);
    LimitValue out;
    out.roots = static_cast<int>(scan.roots.size());
    if (scan.anomaly()) out.quality = LimitQuality::multiple_roots;
    for (const auto& root : scan.roots) {
        const Jet& s = root.senior;
        const Jet& g = root.junior;
        const double dz_us = -s.d_z / s.d_u;
        const double dz_uj = -g.d_z / g.d_u;
        const double denom = std::abs(s.d_u) * std::abs(g.d_u) * std::abs(dz_us - dz_uj);
        if (std::abs(s.d_u) < kSingular || std::abs(g.d_u) < kSingular ||
            std::abs(dz_us - dz_uj) < kSingular) {
            if (out.quality == LimitQuality::ok) out.quality = LimitQuality::near_singular;
        }
        if (!(denom > 0.0)) continue;
        out.density += quadrature::chi_squared_density(root.z0, params.n_fluct) *
                       quadrature::common_factor_density(root.u0, params.n_fluct) / denom;
    }
    return out;
}

double density_limit_equal_infinite(double l, double face, const MarketParams& params) {
    require_factor(params);
    if (!(face > 0.0)) throw DomainError("limit density: face must be positive");
    return integrate_z(
        [&](double z) {
            const auto root = plain_root(l, z, face, params);
            if (!root) return 0.0;
            return quadrature::common_factor_density(root->root, params.n_fluct) /
                   std::abs(root->at_root.d_u);
        },
        params.n_fluct);
}

double density_limit_finite_vs_infinite(double l1, double l2, int r1, double face,
                                        const MarketParams& params) {
    require_factor(params);
    if (r1 < 2) throw DomainError("limit density: R1 must be at least 2");
    if (!(face > 0.0)) throw DomainError("limit density: face must be positive");
    return integrate_z(
        [&](double z) {
            const auto root = plain_root(l2, z, face, params);
            if (!root) return 0.0;
            const auto m = plain_moments(z, root->root, face, params);
            const double var = (m[2] - m[1] * m[1]) / r1;
            if (!(var > 0.0)) return 0.0;
            return quadrature::common_factor_density(root->root, params.n_fluct) *
                   gaussian_pdf(l1, m[1], var) / std::abs(root->at_root.d_u);
        },
        params.n_fluct);
}

double density_limit_two_markets(double l1, double l2, double face1, const MarketParams& params1,
                                 double face2, const MarketParams& params2) {
    require_factor(params1);
    require_factor(params2);
    if (params1.n_fluct != params2.n_fluct) {
        throw DomainError("limit density: both markets must share N");
    }
    if (!(face1 > 0.0) || !(face2 > 0.0)) throw DomainError("limit density: faces must be positive");
    const double n = params1.n_fluct;
    return integrate_z(
        [&](double z) {
            const auto a = plain_root(l1, z, face1, params1);
            if (!a) return 0.0;
            const auto b = plain_root(l2, z, face2, params2);
            if (!b) return 0.0;
            return quadrature::common_factor_density(a->root, n) *
                   quadrature::common_factor_density(b->root, n) /
                   (std::abs(a->at_root.d_u) * std::abs(b->at_root.d_u));
        },
        n);
}

DensityGrid grid_limit_subordinated(const SubordinationSpec& spec, const MarketParams& params,
                                    const Axis& ax, const Axis& ay) {
    DensityGrid grid(ax, ay);
    grid.quality.assign(grid.values.size(), 0);
    parallel_for(grid.values.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const int i = static_cast<int>(k / ay.cells), j = static_cast<int>(k % ay.cells);
            const auto v = density_limit_subordinated(ax.center(i), ay.center(j), spec, params);
            grid.values[k] = v.density;
            grid.quality[k] = static_cast<int>(v.quality);
        }
    });
    return grid;
}

}  // namespace jointloss
