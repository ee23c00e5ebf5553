#include "jointloss/loss/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "jointloss/loss/bivariate_normal.hpp"
#include "jointloss/model/normal.hpp"
#include "jointloss/parallel.hpp"

namespace jointloss {

namespace {

// Beyond this many standard deviations a normal CDF is 0 or 1 to double precision
// for the purpose of cell masses.
constexpr double kCut = 9.0;

double standardized_cdf_lattice(double xs, double ys, double r, double px, double py) {
    if (xs < -kCut || ys < -kCut) return 0.0;
    if (xs > kCut) return py;
    if (ys > kCut) return px;
    return bvn_cdf(xs, ys, r);
}

}  // namespace

void Mixture2::add(const Gaussian2& g) {
    const bool usable = g.weight > 0.0 && std::isfinite(g.mean1) && std::isfinite(g.mean2) &&
                        g.var1 > 0.0 && g.var2 > 0.0 && std::isfinite(g.cov);
    const double cond = usable ? g.var2 - g.cov * g.cov / g.var1 : 0.0;
    if (!usable || !(cond > 0.0) || !std::isfinite(cond)) {
        skipped_ += std::max(0.0, g.weight);
        return;
    }
    const double s1 = std::sqrt(g.var1);
    const double s2 = std::sqrt(g.var2);
    comps_.push_back({g.weight, g.mean1, g.mean2, s1, s2, std::clamp(g.cov / (s1 * s2), -1.0, 1.0),
                      g.cov / g.var1, std::sqrt(cond)});
    weight_ += g.weight;
}

double Mixture2::density(double x, double y) const {
    double sum = 0.0;
    for (const auto& c : comps_) {
        const double t = (x - c.m1) / c.s1;
        if (std::abs(t) > 40.0) continue;
        const double cm = c.m2 + c.slope * (x - c.m1);
        const double v = (y - cm) / c.cs;
        if (std::abs(v) > 40.0) continue;
        sum += c.w * normal_pdf(t) / c.s1 * normal_pdf(v) / c.cs;
    }
    return sum;
}

double Mixture2::marginal_density(int axis, double x) const {
    double sum = 0.0;
    for (const auto& c : comps_) {
        const double m = axis == 0 ? c.m1 : c.m2;
        const double s = axis == 0 ? c.s1 : c.s2;
        sum += c.w * normal_pdf((x - m) / s) / s;
    }
    return sum;
}

double Mixture2::rectangle(double x0, double x1, double y0, double y1) const {
    double sum = 0.0;
    for (const auto& c : comps_) {
        const double a0 = (x0 - c.m1) / c.s1, a1 = (x1 - c.m1) / c.s1;
        const double b0 = (y0 - c.m2) / c.s2, b1 = (y1 - c.m2) / c.s2;
        const double pa0 = phi(a0), pa1 = phi(a1), pb0 = phi(b0), pb1 = phi(b1);
        const double f11 = standardized_cdf_lattice(a1, b1, c.r, pa1, pb1);
        const double f01 = standardized_cdf_lattice(a0, b1, c.r, pa0, pb1);
        const double f10 = standardized_cdf_lattice(a1, b0, c.r, pa1, pb0);
        const double f00 = standardized_cdf_lattice(a0, b0, c.r, pa0, pb0);
        sum += c.w * std::max(0.0, f11 - f01 - f10 + f00);
    }
    return sum;
}

std::vector<double> Mixture2::cell_masses(const Axis& ax, const Axis& ay) const {
    const int nx = ax.cells, ny = ay.cells;
    std::vector<double> out(static_cast<std::size_t>(nx) * ny, 0.0);
    parallel_for(nx, [&](std::size_t i_begin, std::size_t i_end) {
        const int rows = static_cast<int>(i_end - i_begin) + 1;
        std::vector<double> xs(rows), px(rows), ys(ny + 1), py(ny + 1);
        std::vector<double> corner(static_cast<std::size_t>(rows) * (ny + 1));
        for (const auto& c : comps_) {
            // skip components whose +-kCut box misses these rows entirely
            const double lo = ax.edge(static_cast<int>(i_begin));
            const double hi = ax.edge(static_cast<int>(i_end));
            if (c.m1 + kCut * c.s1 < lo || c.m1 - kCut * c.s1 > hi) continue;
            for (int a = 0; a < rows; ++a) {
                xs[a] = (ax.edge(static_cast<int>(i_begin) + a) - c.m1) / c.s1;
                px[a] = phi(xs[a]);
            }
            for (int b = 0; b <= ny; ++b) {
                ys[b] = (ay.edge(b) - c.m2) / c.s2;
                py[b] = phi(ys[b]);
            }
            for (int a = 0; a < rows; ++a) {
                for (int b = 0; b <= ny; ++b) {
                    corner[static_cast<std::size_t>(a) * (ny + 1) + b] =
                        standardized_cdf_lattice(xs[a], ys[b], c.r, px[a], py[b]);
                }
            }
            for (int a = 0; a + 1 < rows; ++a) {
                const double* lo_row = &corner[static_cast<std::size_t>(a) * (ny + 1)];
                const double* hi_row = lo_row + (ny + 1);
                double* cell = &out[(i_begin + a) * ny];
                for (int b = 0; b < ny; ++b) {
                    const double m = hi_row[b + 1] - lo_row[b + 1] - hi_row[b] + lo_row[b];
                    if (m > 0.0) cell[b] += c.w * m;
                }
            }
        }
    });
    return out;
}

double Mixture2::tail(int axis, double t) const {
    double sum = 0.0;
    for (const auto& c : comps_) {
        const double m = axis == 0 ? c.m1 : c.m2;
        const double s = axis == 0 ? c.s1 : c.s2;
        sum += c.w * phi((m - t) / s);
    }
    return sum;
}

double Mixture2::difference_tail(double a) const {
    double sum = 0.0;
    for (const auto& c : comps_) {
        const double var = c.s1 * c.s1 + c.s2 * c.s2 - 2.0 * c.r * c.s1 * c.s2;
        const double mean = c.m1 - c.m2 - a;
        if (var > 0.0) {
            sum += c.w * phi(mean / std::sqrt(var));
        } else if (mean > 0.0) {
            sum += c.w;
        }
    }
    return sum;
}

std::vector<double> Mixture2::grid_density(const Axis& ax, const Axis& ay) const {
    const int nx = ax.cells, ny = ay.cells;
    std::vector<double> out(static_cast<std::size_t>(nx) * ny, 0.0);
    parallel_for(static_cast<std::size_t>(nx) * ny, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const int i = static_cast<int>(k / ny), j = static_cast<int>(k % ny);
            out[k] = density(ax.center(i), ay.center(j));
        }
    });
    return out;
}

void Mixture1::add(double weight, double mean, double var) {
    if (!(weight > 0.0) || !(var > 0.0) || !std::isfinite(var) || !std::isfinite(mean)) {
        skipped_ += std::max(0.0, weight);
        return;
    }
    comps_.push_back({weight, mean, std::sqrt(var)});
    weight_ += weight;
}

double Mixture1::density(double x) const {
    double sum = 0.0;
    for (const auto& c : comps_) sum += c.w * normal_pdf((x - c.m) / c.s) / c.s;
    return sum;
}

double Mixture1::tail(double t) const {
    double sum = 0.0;
    for (const auto& c : comps_) sum += c.w * phi((c.m - t) / c.s);
    return sum;
}

double Mixture1::interval(double a, double b) const {
    double sum = 0.0;
    for (const auto& c : comps_) sum += c.w * (phi((b - c.m) / c.s) - phi((a - c.m) / c.s));
    return sum;
}

}  // namespace jointloss
