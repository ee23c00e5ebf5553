#pragma once

#include <cmath>
#include <vector>

namespace jointloss {

/// One homogeneous market: geometric Brownian motions with drift `mu` and
/// volatility `rho`, average correlation `c` and fluctuation strength
/// `n_fluct` (the N of the Wishart ensemble) over the horizon `t_mat`.
struct MarketParams {
    double mu = 0.0;
    double rho = 0.0;
    double c = 0.0;
    double n_fluct = 0.0;
    double t_mat = 0.0;
    double v0 = 0.0;

    /// Throws DomainError unless rho > 0, 0 <= c < 1, n_fluct > 0, t_mat > 0, v0 > 0.
    void validate() const;

    /// (mu - rho^2/2) T, the Ito drift of the log asset value.
    double log_drift() const noexcept { return (mu - 0.5 * rho * rho) * t_mat; }
    /// sqrt(cT) rho, loading of the common factor u.
    double factor_loading() const noexcept { return std::sqrt(c * t_mat) * rho; }
    /// sqrt((1-c) T rho^2 / N), idiosyncratic scale of the rescaled log value.
    double idiosyncratic_scale() const noexcept {
        return std::sqrt((1.0 - c) * t_mat * rho * rho / n_fluct);
    }

    /// Parameter set estimated from S&P 500 stocks (1992-2012).
    static MarketParams empirical() noexcept {
        return {.mu = 0.17, .rho = 0.35, .c = 0.28, .n_fluct = 6.0, .t_mat = 1.0, .v0 = 100.0};
    }
};

struct MarketBlock {
    MarketParams params;
    int size = 0;
};

/// Block-diagonal average correlation: markets that are uncorrelated on
/// average but share the fluctuation strength N.
struct MultiMarketParams {
    std::vector<MarketBlock> blocks;
    double n_fluct = 0.0;

    int beta() const noexcept { return static_cast<int>(blocks.size()); }
    int total_size() const noexcept;
    void validate() const;

    static MultiMarketParams single(const MarketParams& params, int size);
};

/// Senior/junior split of a homogeneous obligor's face value.
struct SubordinationSpec {
    double f_senior = 0.0;
    double f_junior = 0.0;

    double total() const noexcept { return f_senior + f_junior; }
    void validate() const;
};

/// Two creditors on K homogeneous obligors: a fraction r1 lends only from
/// creditor one, r12 is shared with creditor one holding gamma of the face
/// value, the rest belongs to creditor two.
struct OverlapSpec {
    double r1 = 0.5;
    double r12 = 0.0;
    double gamma = 0.5;
    double f0 = 0.0;

    void validate() const;
};

/// Transformed default threshold F_hat = (ln(F/V0) - (mu - rho^2/2)T) / sqrt(z).
struct DefaultThreshold {
    double f_hat = 0.0;
    double face = 0.0;
    double z = 0.0;
    MarketParams params;
};

DefaultThreshold default_threshold(double face, const MarketParams& params, double z);

}  // namespace jointloss
