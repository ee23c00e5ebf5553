#pragma once

#include <span>
#include <vector>

namespace jointloss::mc {

struct KsResult {
    double statistic = 0.0;  ///< sup |F1 - F2|
    double p_value = 1.0;    ///< asymptotic Kolmogorov distribution
};

/// Two-sample Kolmogorov-Smirnov test. Ties (the delta atoms of portfolio
/// losses) are handled by evaluating both empirical CDFs after each distinct
/// value, which makes the asymptotic p-value conservative.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// Sample mean, variance (n - 1) and excess-free kurtosis E[(x-m)^4]/var^2.
struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
    double kurtosis = 0.0;
};

SampleMoments sample_moments(std::span<const double> x);

}  // namespace jointloss::mc
