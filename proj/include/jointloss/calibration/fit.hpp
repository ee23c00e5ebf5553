#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

namespace jointloss {

/// M observations (rows) of K return series (columns).
struct ReturnSample {
    Eigen::MatrixXd returns;

    int m() const noexcept { return static_cast<int>(returns.rows()); }
    int k() const noexcept { return static_cast<int>(returns.cols()); }
    /// Returns with each column's sample mean removed.
    Eigen::MatrixXd centered() const;
    /// Sample covariance of the centered returns (divisor M - 1).
    Eigen::MatrixXd covariance() const;
};

struct FitOptions {
    double n_min = 0.5;
    double n_max = 2000.0;  ///< grid cap: a maximum here means "no fluctuations detected"
    int grid_points = 60;   ///< logarithmically spaced
    double tol = 1e-6;      ///< relative tolerance of the golden-section refinement
};

struct FitResult {
    double n_hat = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    bool boundary = false;        ///< maximum at an end of the grid
    bool pseudo_inverse = false;  ///< Sigma-hat rank deficient; fitted on its range
    int rank = 0;
    std::vector<double> grid_n;
    std::vector<double> profile;  ///< summed log-likelihood at grid_n

    nlohmann::json to_json() const;
};

/// Maximum-likelihood N with Sigma fixed at the sample covariance (two-step
/// fit): scan the grid, refine the best interior point by golden section.
/// A maximum at a grid end is returned with boundary = true. Throws
/// InconclusiveFitError when the profile is flat or not finite.
FitResult fit_n(const ReturnSample& sample, const FitOptions& options = {});

/// Mean off-diagonal entry of the correlation matrix of sigma, i.e. the c of
/// the one-parameter family (1 - c) 1 + c e e'. DomainError for K = 1.
double effective_correlation(const Eigen::MatrixXd& sigma);

}  // namespace jointloss
