#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jointloss/model/market.hpp"
#include "jointloss/model/moments.hpp"

namespace jointloss {

/// Root of target = m(u) for one of the conditional mean-loss functions.
struct ImplicitSolve {
    double target = 0.0;
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
    Jet at_root;  ///< m and its partials at the root
};

/// Number of samples used to bracket a root and assert monotonicity in u.
inline constexpr int kMonotoneSamples = 33;

/// Root search bracket for u: [-12/sqrt(N), 12/sqrt(N)].
double u_bracket(const MarketParams& params);
/// Search range for z: [1e-6, 1 - 1e-10 chi-squared quantile].
double z_lower();
double z_upper(double n_fluct);

/// Solve target = m(u) on [lo, hi] for m nondecreasing in u, by safeguarded
/// Newton with bisection fallback. Returns nullopt when the target lies
/// outside (m(lo), m(hi)). No monotonicity scan.
std::optional<ImplicitSolve> invert_increasing(const std::function<Jet(double)>& m, double target,
                                               double lo, double hi);

/// Scanning solver: samples m at kMonotoneSamples points of the u bracket,
/// throws DomainError if m decreases anywhere, then refines inside the
/// bracketing interval.
std::optional<ImplicitSolve> solve_monotone_u(const std::function<Jet(double)>& m, double target,
                                              double lo, double hi);

/// u^(S)(lS, z): root of lS = m^(S)_1(z, u).
std::optional<ImplicitSolve> solve_u_senior(double ls, double z, const SubordinationSpec& spec,
                                            const MarketParams& params);
/// u^(J)(lJ, z): root of lJ = m^(S)_0(z, u) + m^(J)_1(z, u).
std::optional<ImplicitSolve> solve_u_junior(double lj, double z, const SubordinationSpec& spec,
                                            const MarketParams& params);
/// u_0(l, z): root of l = m_1(z, u) for the undivided loss.
std::optional<ImplicitSolve> solve_u_plain(double l, double z, double face,
                                           const MarketParams& params);

/// z_0 with u^(S)(lS, z_0) = u^(J)(lJ, z_0).
struct ZeroSolve {
    double z0 = 0.0;
    double u0 = 0.0;
    Jet senior;  ///< m^(S)_1 at (z0, u0)
    Jet junior;  ///< m^(S)_0 + m^(J)_1 at (z0, u0)
    double residual_senior = 0.0;
    double residual_junior = 0.0;
};

struct ZeroScan {
    std::vector<ZeroSolve> roots;
    bool anomaly() const noexcept { return roots.size() > 1; }
};

/// Scans a logarithmic z grid for sign changes of u^(S) - u^(J) and refines
/// every one found. More than one root is reported as an anomaly, never
/// resolved silently.
ZeroScan scan_z0(double ls, double lj, const SubordinationSpec& spec, const MarketParams& params);

/// The unique z_0, or nullopt when u^(S) - u^(J) has no sign change on the
/// z range (the limit density vanishes there). Throws ConvergenceError when
/// the scan finds several roots.
std::optional<ZeroSolve> solve_z0(double ls, double lj, const SubordinationSpec& spec,
                                  const MarketParams& params);

}  // namespace jointloss
