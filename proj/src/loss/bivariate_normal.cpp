#include "jointloss/loss/bivariate_normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "jointloss/model/normal.hpp"

namespace jointloss {

namespace {

// Half Gauss-Legendre rules with 6, 12 and 20 points on [-1, 1].
constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384,
                                       0.4679139345726904};
constexpr std::array<double, 3> kX6 = {-0.9324695142031522, -0.6612093864662647,
                                       -0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 6> kX12 = {-0.9815606342467191, -0.9041172563704750,
                                        -0.7699026741943050, -0.5873179542866171,
                                        -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};
constexpr std::array<double, 10> kX20 = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
    -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
    -0.2277858511416451, -0.07652652113349733};

template <std::size_t n>
double upper_small_r(double h, double k, double r, const std::array<double, n>& w,
                     const std::array<double, n>& x) {
    const double hk = h * k;
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (double sign : {-1.0, 1.0}) {
            const double sn = std::sin(0.5 * asr * (sign * x[i] + 1.0));
            sum += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
    }
    return sum * asr / (4.0 * M_PI) + phi(-h) * phi(-k);
}

double upper_large_r(double h, double k, double r) {
    const auto& w = kW20;
    const auto& x = kX20;
    double hk = h * k;
    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    double bvn = 0.0;
    if (std::abs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-0.5 * (bs / as + hk)) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-0.5 * hk) * std::sqrt(2.0 * M_PI) * phi(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a *= 0.5;
        for (std::size_t i = 0; i < w.size(); ++i) {
            for (double sign : {-1.0, 1.0}) {
                const double xs = std::pow(a * (sign * x[i] + 1.0), 2);
                const double rs = std::sqrt(1.0 - xs);
                bvn += a * w[i] *
                       (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                        std::exp(-0.5 * (bs / xs + hk)) * (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
        bvn = -bvn / (2.0 * M_PI);
    }
    if (r > 0.0) return bvn + phi(-std::max(h, k));
    if (h >= k) return -bvn;
    const double band = h < 0.0 ? phi(k) - phi(h) : phi(-h) - phi(-k);
    return band - bvn;
}

// P(X > h, Y > k)
double bvn_upper(double h, double k, double r) {
    const double ar = std::abs(r);
    if (ar < 0.3) return upper_small_r(h, k, r, kW6, kX6);
    if (ar < 0.75) return upper_small_r(h, k, r, kW12, kX12);
    if (ar < 0.925) return upper_small_r(h, k, r, kW20, kX20);
    return upper_large_r(h, k, r);
}

}  // namespace

double bvn_cdf(double x, double y, double r) {
    r = std::clamp(r, -1.0, 1.0);
    if (std::isinf(x) || std::isinf(y)) {
        if (x == -INFINITY || y == -INFINITY) return 0.0;
        if (x == INFINITY) return phi(y);
        return phi(x);
    }
    return std::clamp(bvn_upper(-x, -y, r), 0.0, 1.0);
}

}  // namespace jointloss
