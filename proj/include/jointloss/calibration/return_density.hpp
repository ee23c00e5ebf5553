#pragma once

#include <Eigen/Dense>

namespace jointloss {

/// ln of the ensemble-averaged return density
///   <g>(r | Sigma, N) = sqrt(N)^K / (sqrt(2)^(N-2) Gamma(N/2) sqrt(det(2 pi Sigma)))
///                        K_nu(sqrt(N q)) / sqrt(N q)^nu,   nu = (K - N)/2,  q = r' Sigma^-1 r.
/// At q = 0 the limit Gamma(|nu|) 2^(|nu|-1) of K_nu(x)/x^nu is used for N > K;
/// for N <= K the density diverges there and +inf is returned.
double log_return_density(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma, double n_fluct);

double return_density(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma, double n_fluct);

/// Same law expressed through q = r' Sigma^-1 r, the dimension K and
/// ln det(2 pi Sigma); the likelihood profile reuses q across N.
double log_return_density_q(double q, int k_dim, double log_det_2pi_sigma, double n_fluct);

}  // namespace jointloss
