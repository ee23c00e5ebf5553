#include "jointloss/calibration/fit.hpp"

#include <algorithm>
#include <cmath>

#include "jointloss/calibration/return_density.hpp"
#include "jointloss/errors.hpp"

namespace jointloss {

Eigen::MatrixXd ReturnSample::centered() const {
    Eigen::MatrixXd c = returns;
    c.rowwise() -= returns.colwise().mean();
    return c;
}

Eigen::MatrixXd ReturnSample::covariance() const {
    if (m() < 2) throw DomainError("return sample: need at least two observations");
    const Eigen::MatrixXd c = centered();
    return (c.transpose() * c) / (m() - 1.0);
}

namespace {

struct Projected {
    std::vector<double> q;
    int rank = 0;
    double log_det = 0.0;  // ln det(2 pi Sigma) on the range
    bool pseudo = false;
};

Projected project(const ReturnSample& sample) {
    const Eigen::MatrixXd sigma = sample.covariance();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double top = lam.maxCoeff();
    if (!(top > 0.0)) throw DomainError("fit_n: sample covariance vanishes");
    Projected p;
    std::vector<int> keep;
    for (int i = 0; i < lam.size(); ++i) {
        if (lam(i) > 1e-12 * top) keep.push_back(i);
    }
    p.rank = static_cast<int>(keep.size());
    p.pseudo = p.rank < sample.k();
    for (int i : keep) p.log_det += std::log(2.0 * M_PI * lam(i));
    const Eigen::MatrixXd c = sample.centered();
    const Eigen::MatrixXd y = c * eig.eigenvectors();
    p.q.assign(sample.m(), 0.0);
    for (int t = 0; t < sample.m(); ++t) {
        double q = 0.0;
        for (int i : keep) q += y(t, i) * y(t, i) / lam(i);
        p.q[t] = q;
    }
    return p;
}

double log_likelihood(const Projected& p, double n) {
    double sum = 0.0;
    for (double q : p.q) sum += log_return_density_q(q, p.rank, p.log_det, n);
    return sum;
}

}  // namespace

FitResult fit_n(const ReturnSample& sample, const FitOptions& options) {
    if (!(options.n_min > 0.0) || !(options.n_max > options.n_min) || options.grid_points < 3) {
        throw DomainError("fit_n: invalid search options");
    }
    const Projected p = project(sample);
    FitResult out;
    out.rank = p.rank;
    out.pseudo_inverse = p.pseudo;

    const double lo = std::log(options.n_min), hi = std::log(options.n_max);
    int best = 0;
    for (int i = 0; i < options.grid_points; ++i) {
        const double n = std::exp(lo + (hi - lo) * i / (options.grid_points - 1));
        const double ll = log_likelihood(p, n);
        out.grid_n.push_back(n);
        out.profile.push_back(ll);
        if (!std::isfinite(ll)) {
            throw InconclusiveFitError("fit_n: log-likelihood not finite at N = " + std::to_string(n));
        }
        if (ll > out.profile[best]) best = i;
    }
    const auto [mn, mx] = std::minmax_element(out.profile.begin(), out.profile.end());
    if (*mx - *mn <= 1e-9 * std::max(1.0, std::abs(*mx))) {
        throw InconclusiveFitError("fit_n: flat likelihood profile");
    }
    if (best == 0 || best == options.grid_points - 1) {
        out.boundary = true;
        out.n_hat = out.grid_n[best];
        out.log_likelihood = out.profile[best];
        return out;
    }
    // golden section on ln N over the two neighbouring grid cells
    double a = std::log(out.grid_n[best - 1]), b = std::log(out.grid_n[best + 1]);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = log_likelihood(p, std::exp(c)), fd = log_likelihood(p, std::exp(d));
    for (int it = 0; it < 200 && (b - a) > options.tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = log_likelihood(p, std::exp(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = log_likelihood(p, std::exp(d));
        }
    }
    out.converged = (b - a) <= options.tol;
    out.n_hat = std::exp(0.5 * (a + b));
    out.log_likelihood = log_likelihood(p, out.n_hat);
    return out;
}

double effective_correlation(const Eigen::MatrixXd& sigma) {
    const Eigen::Index k = sigma.rows();
    if (k != sigma.cols()) throw DomainError("effective_correlation: matrix must be square");
    if (k < 2) throw DomainError("effective_correlation: undefined for K = 1");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(sigma(i, i) > 0.0)) throw DomainError("effective_correlation: zero variance");
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i != j) sum += sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j));
        }
    }
    return sum / (static_cast<double>(k) * (k - 1));
}

nlohmann::json FitResult::to_json() const {
    return {{"n_hat", n_hat},       {"log_likelihood", log_likelihood},
            {"converged", converged}, {"boundary", boundary},
            {"pseudo_inverse", pseudo_inverse}, {"rank", rank},
            {"grid_n", grid_n},     {"profile", profile}};
}

}  // namespace jointloss
