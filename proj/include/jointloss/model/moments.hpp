#pragma once

#include <array>

#include "jointloss/model/market.hpp"

namespace jointloss {

enum class Tranche { senior, junior };

/// Value of a scalar function of the node (z, u) with its two partial derivatives.
struct Jet {
    double value = 0.0;
    double d_z = 0.0;
    double d_u = 0.0;
};

/// Conditional loss moments at a quadrature node.
///
/// Given the common variance factor z and the common return factor u, the
/// rescaled log asset value V_hat = (ln(V/V0) - (mu - rho^2/2)T)/sqrt(z) is
/// Gaussian with mean -sqrt(cT) rho u and variance (1-c) T rho^2 / N. All
/// moments below are expectations of a power of a per-obligor loss times the
/// indicator of a default band, under that Gaussian.
///
/// tau^{iota,lambda}_j integrates (c_iota - V/F_iota)^j over V < F_lambda where
///   c_senior = 1,           F_senior = f_senior   (both as divisor and threshold),
///   c_junior = F/f_junior,  divisor f_junior, threshold F = f_senior + f_junior.
/// Closed forms use Phi only; j must be 0, 1 or 2.
double tau(int j, Tranche iota, Tranche lambda, double z, double u,
           const SubordinationSpec& faces, const MarketParams& params);

/// m^(S)_j = tau^{S,S}_j: moments of the senior loss 1 - V/F^(S) on V < F^(S).
double moment_senior(int j, double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params);

/// m^(J)_j = tau^{J,J}_j - tau^{J,S}_j: moments of the junior loss
/// 1 - (V - F^(S))/F^(J) on the junior-only band F^(S) <= V < F.
double moment_junior(int j, double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params);

/// m_j: moments of the undivided loss 1 - V/F on V < F.
double moment_plain(int j, double z, double u, double face, const MarketParams& params);

struct SubordinatedMoments {
    std::array<double, 3> senior{};  ///< m^(S)_0..2
    std::array<double, 3> junior{};  ///< m^(J)_0..2
};

/// All six subordinated moments at one node, sharing the Phi evaluations.
SubordinatedMoments subordinated_moments(double z, double u, const SubordinationSpec& faces,
                                         const MarketParams& params);

/// m_0..2 for the undivided loss at one node.
std::array<double, 3> plain_moments(double z, double u, double face, const MarketParams& params);

/// m^(S)_1 with derivatives: conditional mean senior loss of one obligor.
Jet senior_mean_loss(double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params);

/// m^(S)_0 + m^(J)_1 with derivatives: conditional mean junior loss of one
/// obligor (a senior default is a total junior loss).
Jet junior_mean_loss(double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params);

/// m_1 with derivatives.
Jet plain_mean_loss(double z, double u, double face, const MarketParams& params);

}  // namespace jointloss
