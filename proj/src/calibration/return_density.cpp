#include "jointloss/calibration/return_density.hpp"

#include <cmath>
#include <limits>

#include "jointloss/calibration/bessel.hpp"
#include "jointloss/errors.hpp"

namespace jointloss {

double log_return_density_q(double q, int k_dim, double log_det_2pi_sigma, double n_fluct) {
    if (!(n_fluct > 0.0)) throw DomainError("return_density: N must be positive");
    if (!(q >= 0.0)) throw DomainError("return_density: q must be nonnegative");
    const double k = k_dim;
    const double nu = 0.5 * (k - n_fluct);
    const double head = 0.5 * k * std::log(n_fluct) - 0.5 * (n_fluct - 2.0) * std::log(2.0) -
                        std::lgamma(0.5 * n_fluct) - 0.5 * log_det_2pi_sigma;
    const double x = std::sqrt(n_fluct * q);
    if (x < 1e-12) {
        if (!(nu < 0.0)) return std::numeric_limits<double>::infinity();
        const double a = -nu;
        return head + std::lgamma(a) + (a - 1.0) * std::log(2.0);
    }
    return head + log_bessel_k(nu, x) - nu * std::log(x);
}

double log_return_density(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma,
                          double n_fluct) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != r.size()) {
        throw DomainError("return_density: dimension mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw DomainError("return_density: Sigma is not positive definite");
    const Eigen::VectorXd y = llt.matrixL().solve(r);
    const double q = y.squaredNorm();
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum() +
                           r.size() * std::log(2.0 * M_PI);
    return log_return_density_q(q, static_cast<int>(r.size()), log_det, n_fluct);
}

double return_density(const Eigen::VectorXd& r, const Eigen::MatrixXd& sigma, double n_fluct) {
    return std::exp(log_return_density(r, sigma, n_fluct));
}

}  // namespace jointloss
