#pragma once

#include <Eigen/Dense>
#include <random>
#include <span>

#include "jointloss/model/market.hpp"

namespace jointloss::mc {

using Rng = std::mt19937_64;

/// Draws centered log-returns x_k = ln(V_k(T)/V0) - (mu - rho^2/2)T of all
/// obligors (blocks concatenated) for one scenario of the market.
class Sampler {
public:
    virtual ~Sampler() = default;
    virtual void draw(Rng& rng, std::span<double> x) = 0;
    virtual int size() const = 0;
};

/// Compound representation: z ~ chi2_N shared by all blocks, u_l ~ N(0, z/N)
/// per block, x_k = -sqrt(cT) rho u_l + sqrt(z (1-c) T / N) rho eps_k.
class CompoundSampler final : public Sampler {
public:
    explicit CompoundSampler(const MultiMarketParams& markets);
    void draw(Rng& rng, std::span<double> x) override;
    int size() const override { return markets_.total_size(); }

private:
    MultiMarketParams markets_;
    std::chi_squared_distribution<double> chi2_;
    std::normal_distribution<double> normal_;
};

/// Explicit Wishart ensemble: W = L G / sqrt(N) with G a K x N standard normal
/// matrix and L L^T = Sigma = blockdiag(rho_l^2 T C_l); returns r = W xi with
/// xi ~ N(0, 1_N), i.e. a Gaussian draw with covariance W W^T.
class WishartSampler final : public Sampler {
public:
    /// Integral N and K <= max_obligors required; SamplerLimitError otherwise.
    explicit WishartSampler(const MultiMarketParams& markets, int max_obligors = 500);
    void draw(Rng& rng, std::span<double> x) override;
    int size() const override { return static_cast<int>(chol_.rows()); }

    /// One random covariance matrix W W^T.
    Eigen::MatrixXd draw_covariance(Rng& rng);
    const Eigen::MatrixXd& mean_covariance() const noexcept { return sigma_; }

private:
    void draw_w(Rng& rng);

    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd chol_;
    Eigen::MatrixXd g_;
    Eigen::MatrixXd w_;
    Eigen::VectorXd xi_;
    int n_ = 0;
    std::normal_distribution<double> normal_;
};

/// Asset values V_k(T) = V0 exp(drift + x_k) for centered log-returns x.
void asset_values(const MultiMarketParams& markets, std::span<const double> x,
                  std::span<double> v);

/// n draws of V_k(T) in an n x K matrix (row per scenario), from a seeded stream.
Eigen::MatrixXd sample_compound(const MultiMarketParams& markets, int n, std::uint64_t seed);
Eigen::MatrixXd sample_wishart(const MultiMarketParams& markets, int n, std::uint64_t seed);

/// The mean covariance of centered log-returns: blockdiag(rho_l^2 T ((1-c_l) 1 + c_l e e^T)).
Eigen::MatrixXd mean_covariance(const MultiMarketParams& markets);

}  // namespace jointloss::mc
