#pragma once

#include <vector>

#include "jointloss/loss/density_grid.hpp"

namespace jointloss {

/// One weighted bivariate Gaussian: the conditional loss law at a quadrature node.
struct Gaussian2 {
    double weight = 0.0;
    double mean1 = 0.0;
    double mean2 = 0.0;
    double var1 = 0.0;
    double var2 = 0.0;
    double cov = 0.0;
};

/// Finite mixture of bivariate Gaussians (one component per quadrature node).
/// Components whose covariance is not positive definite in floating point are
/// dropped and their weight is tracked in skipped_weight(); they stand for
/// conditional laws so sharp that they carry no density at grid resolution.
class Mixture2 {
public:
    void add(const Gaussian2& g);

    std::size_t size() const noexcept { return comps_.size(); }
    double weight() const noexcept { return weight_; }
    double skipped_weight() const noexcept { return skipped_; }

    double density(double x, double y) const;
    /// Marginal density of coordinate `axis` (0 or 1), integrated over the real line.
    double marginal_density(int axis, double x) const;
    double rectangle(double x0, double x1, double y0, double y1) const;
    /// Exact Gaussian mass of every cell of the product grid, x-major.
    std::vector<double> cell_masses(const Axis& ax, const Axis& ay) const;
    /// P(coordinate `axis` > t).
    double tail(int axis, double t) const;
    /// P(X - Y > a).
    double difference_tail(double a) const;
    /// Densities at every cell center, x-major.
    std::vector<double> grid_density(const Axis& ax, const Axis& ay) const;

private:
    struct Component {
        double w, m1, m2, s1, s2, r, slope, cs;
    };
    std::vector<Component> comps_;
    double weight_ = 0.0;
    double skipped_ = 0.0;
};

/// Univariate counterpart for single-creditor portfolios.
class Mixture1 {
public:
    void add(double weight, double mean, double var);

    std::size_t size() const noexcept { return comps_.size(); }
    double weight() const noexcept { return weight_; }
    double skipped_weight() const noexcept { return skipped_; }

    double density(double x) const;
    double tail(double t) const;
    double interval(double a, double b) const;

private:
    struct Component {
        double w, m, s;
    };
    std::vector<Component> comps_;
    double weight_ = 0.0;
    double skipped_ = 0.0;
};

}  // namespace jointloss
