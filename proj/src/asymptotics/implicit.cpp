#include "jointloss/asymptotics/implicit.hpp"

#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>

#include "jointloss/errors.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss {

namespace {

constexpr int kMaxIterations = 200;
constexpr int kZScanPoints = 96;

void require_factor(const MarketParams& params) {
    params.validate();
    if (!(params.c > 0.0)) {
        throw DomainError("implicit solve: the mean loss depends on u only for c > 0");
    }
}

}  // namespace

double u_bracket(const MarketParams& params) { return quadrature::factor_range(params.n_fluct); }

double z_lower() { return 1e-6; }

double z_upper(double n_fluct) { return quadrature::chi_squared_upper(n_fluct); }

std::optional<ImplicitSolve> invert_increasing(const std::function<Jet(double)>& m, double target,
                                               double lo, double hi) {
    Jet f_lo = m(lo), f_hi = m(hi);
    if (!(target > f_lo.value && target < f_hi.value)) return std::nullopt;

    ImplicitSolve out;
    out.target = target;
    double u = lo + (hi - lo) * (target - f_lo.value) / (f_hi.value - f_lo.value);
    Jet f = m(u);
    for (int it = 1; it <= kMaxIterations; ++it) {
        out.iterations = it;
        const double r = f.value - target;
        if (r == 0.0) break;
        if (r < 0.0) {
            lo = u;
        } else {
            hi = u;
        }
        double next = f.d_u > 0.0 ? u - r / f.d_u : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - u);
        u = next;
        f = m(u);
        if (step < 1e-12 * (1.0 + std::abs(u)) && std::abs(f.value - target) < 1e-13) break;
        if (hi - lo < 1e-15 * (1.0 + std::abs(u))) break;
    }
    out.root = u;
    out.at_root = f;
    out.residual = std::abs(f.value - target);
    if (!(out.residual < 1e-10)) {
        throw ConvergenceError("implicit solve: residual above 1e-10", u, out.residual);
    }
    return out;
}

std::optional<ImplicitSolve> solve_monotone_u(const std::function<Jet(double)>& m, double target,
                                              double lo, double hi) {
    std::array<double, kMonotoneSamples> us{}, vs{};
    for (int i = 0; i < kMonotoneSamples; ++i) {
        us[i] = lo + (hi - lo) * i / (kMonotoneSamples - 1);
        vs[i] = m(us[i]).value;
        if (i > 0 && vs[i] < vs[i - 1] - 1e-14 * (1.0 + std::abs(vs[i - 1]))) {
            throw DomainError("implicit solve: mean loss is not increasing in u");
        }
    }
    if (!(target > vs.front() && target < vs.back())) return std::nullopt;
    int k = 1;
    while (k < kMonotoneSamples - 1 && vs[k] < target) ++k;
    // A target hit exactly at a sample would sit on the open bracket's edge.
    const int upper = vs[k] == target ? k + 1 : k;
    return invert_increasing(m, target, us[k - 1], us[upper]);
}

std::optional<ImplicitSolve> solve_u_senior(double ls, double z, const SubordinationSpec& spec,
                                            const MarketParams& params) {
    require_factor(params);
    spec.validate();
    const double r = u_bracket(params);
    return solve_monotone_u([&](double u) { return senior_mean_loss(z, u, spec, params); }, ls, -r,
                            r);
}

std::optional<ImplicitSolve> solve_u_junior(double lj, double z, const SubordinationSpec& spec,
                                            const MarketParams& params) {
    require_factor(params);
    spec.validate();
    const double r = u_bracket(params);
    return solve_monotone_u([&](double u) { return junior_mean_loss(z, u, spec, params); }, lj, -r,
                            r);
}

std::optional<ImplicitSolve> solve_u_plain(double l, double z, double face,
                                           const MarketParams& params) {
    require_factor(params);
    const double r = u_bracket(params);
    return solve_monotone_u([&](double u) { return plain_mean_loss(z, u, face, params); }, l, -r,
                            r);
}

namespace {

struct PairRoots {
    std::optional<ImplicitSolve> senior, junior;
    bool ok() const { return senior && junior; }
    double gap() const { return senior->root - junior->root; }
};

PairRoots pair_roots(double ls, double lj, double z, const SubordinationSpec& spec,
                     const MarketParams& params, double r) {
    PairRoots p;
    p.senior = invert_increasing([&](double u) { return senior_mean_loss(z, u, spec, params); },
                                 ls, -r, r);
    if (!p.senior) return p;
    p.junior = invert_increasing([&](double u) { return junior_mean_loss(z, u, spec, params); },
                                 lj, -r, r);
    return p;
}

}  // namespace

ZeroScan scan_z0(double ls, double lj, const SubordinationSpec& spec,
                 const MarketParams& params) {
    require_factor(params);
    spec.validate();
    const double r = u_bracket(params);
    const double log_lo = std::log(z_lower());
    const double log_hi = std::log(z_upper(params.n_fluct));

    ZeroScan scan;
    double prev_z = 0.0, prev_gap = 0.0;
    bool prev_ok = false;
    for (int i = 0; i < kZScanPoints; ++i) {
        const double z = std::exp(log_lo + (log_hi - log_lo) * i / (kZScanPoints - 1));
        const PairRoots p = pair_roots(ls, lj, z, spec, params, r);
        const bool ok = p.ok();
        const double gap = ok ? p.gap() : 0.0;
        if (ok && prev_ok && ((prev_gap < 0.0) != (gap < 0.0) || gap == 0.0)) {
            // refine on [prev_z, z]; the roots exist at both ends
            auto f = [&](double zz) {
                const PairRoots q = pair_roots(ls, lj, zz, spec, params, r);
                if (!q.ok()) throw ConvergenceError("z0 refinement left the root domain", zz, 0.0);
                return q.gap();
            };
            std::uintmax_t iters = 100;
            double z0 = z;
            if (gap != 0.0) {
                const auto bracket = boost::math::tools::toms748_solve(
                    f, prev_z, z, prev_gap, gap, boost::math::tools::eps_tolerance<double>(50),
                    iters);
                z0 = 0.5 * (bracket.first + bracket.second);
            }
            const PairRoots q = pair_roots(ls, lj, z0, spec, params, r);
            if (q.ok()) {
                ZeroSolve s;
                s.z0 = z0;
                s.u0 = q.senior->root;
                s.senior = q.senior->at_root;
                s.junior = junior_mean_loss(z0, s.u0, spec, params);
                s.residual_senior = std::abs(s.senior.value - ls);
                s.residual_junior = std::abs(s.junior.value - lj);
                scan.roots.push_back(s);
            }
        }
        prev_ok = ok;
        prev_z = z;
        prev_gap = gap;
    }
    return scan;
}

std::optional<ZeroSolve> solve_z0(double ls, double lj, const SubordinationSpec& spec,
                                  const MarketParams& params) {
    const ZeroScan scan = scan_z0(ls, lj, spec, params);
    if (scan.roots.empty()) return std::nullopt;
    if (scan.anomaly()) {
        throw ConvergenceError("solve_z0: several roots z0 found on the scan grid",
                               scan.roots.front().z0, scan.roots.back().z0 - scan.roots.front().z0);
    }
    return scan.roots.front();
}

}  // namespace jointloss
