#include "jointloss/mc/samplers.hpp"

#include <cmath>
#include <string>

#include "jointloss/errors.hpp"

namespace jointloss::mc {

CompoundSampler::CompoundSampler(const MultiMarketParams& markets)
    : markets_(markets), chi2_(markets.n_fluct) {
    markets_.validate();
}

void CompoundSampler::draw(Rng& rng, std::span<double> x) {
    const double z = chi2_(rng);
    const double n = markets_.n_fluct;
    std::size_t k = 0;
    for (const auto& block : markets_.blocks) {
        const auto& p = block.params;
        const double u = normal_(rng) * std::sqrt(z / n);
        const double common = -std::sqrt(p.c * p.t_mat) * p.rho * u;
        const double idio = std::sqrt(z * (1.0 - p.c) * p.t_mat / n) * p.rho;
        for (int i = 0; i < block.size; ++i) x[k++] = common + idio * normal_(rng);
    }
}

Eigen::MatrixXd mean_covariance(const MultiMarketParams& markets) {
    const int k = markets.total_size();
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(k, k);
    int offset = 0;
    for (const auto& block : markets.blocks) {
        const auto& p = block.params;
        const double var = p.rho * p.rho * p.t_mat;
        for (int i = 0; i < block.size; ++i) {
            for (int j = 0; j < block.size; ++j) {
                sigma(offset + i, offset + j) = var * (i == j ? 1.0 : p.c);
            }
        }
        offset += block.size;
    }
    return sigma;
}

WishartSampler::WishartSampler(const MultiMarketParams& markets, int max_obligors) {
    markets.validate();
    const double n = markets.n_fluct;
    if (std::abs(n - std::round(n)) > 1e-12) {
        throw SamplerLimitError(
            "wishart sampler: N must be an integer for the explicit ensemble; use the compound "
            "sampler");
    }
    const int k = markets.total_size();
    if (k > max_obligors) {
        throw SamplerLimitError("wishart sampler: K = " + std::to_string(k) +
                                " exceeds the budget of " + std::to_string(max_obligors) +
                                " obligors; use the compound sampler");
    }
    n_ = static_cast<int>(std::round(n));
    sigma_ = mc::mean_covariance(markets);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
    if (llt.info() != Eigen::Success) throw DomainError("wishart sampler: Sigma not positive definite");
    chol_ = llt.matrixL();
    g_.resize(k, n_);
    xi_.resize(n_);
}

void WishartSampler::draw_w(Rng& rng) {
    for (int j = 0; j < g_.cols(); ++j) {
        for (int i = 0; i < g_.rows(); ++i) g_(i, j) = normal_(rng);
    }
    w_.noalias() = chol_.triangularView<Eigen::Lower>() * g_;
    w_ /= std::sqrt(static_cast<double>(n_));
}

void WishartSampler::draw(Rng& rng, std::span<double> x) {
    draw_w(rng);
    for (int j = 0; j < n_; ++j) xi_(j) = normal_(rng);
    Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).noalias() = w_ * xi_;
}

Eigen::MatrixXd WishartSampler::draw_covariance(Rng& rng) {
    draw_w(rng);
    return w_ * w_.transpose();
}

void asset_values(const MultiMarketParams& markets, std::span<const double> x,
                  std::span<double> v) {
    std::size_t k = 0;
    for (const auto& block : markets.blocks) {
        const auto& p = block.params;
        const double drift = p.log_drift();
        for (int i = 0; i < block.size; ++i, ++k) v[k] = p.v0 * std::exp(drift + x[k]);
    }
}

namespace {
Eigen::MatrixXd sample_with(Sampler& sampler, const MultiMarketParams& markets, int n,
                            std::uint64_t seed) {
    std::seed_seq seq{seed};
    Rng rng(seq);
    const int k = sampler.size();
    Eigen::MatrixXd out(n, k);
    std::vector<double> x(k), v(k);
    for (int s = 0; s < n; ++s) {
        sampler.draw(rng, x);
        asset_values(markets, x, v);
        for (int i = 0; i < k; ++i) out(s, i) = v[i];
    }
    return out;
}
}  // namespace

Eigen::MatrixXd sample_compound(const MultiMarketParams& markets, int n, std::uint64_t seed) {
    CompoundSampler s(markets);
    return sample_with(s, markets, n, seed);
}

Eigen::MatrixXd sample_wishart(const MultiMarketParams& markets, int n, std::uint64_t seed) {
    WishartSampler s(markets);
    return sample_with(s, markets, n, seed);
}

}  // namespace jointloss::mc
