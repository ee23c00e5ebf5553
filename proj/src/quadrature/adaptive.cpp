#include "jointloss/quadrature/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "jointloss/errors.hpp"

namespace jointloss::quadrature {

namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& other) const { return error < other.error; }
};

Piece kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& options,
                                  std::span<const double> breakpoints) {
    if (!(b > a)) return {};
    std::vector<double> cuts;
    const int pieces = std::max(1, options.initial_pieces);
    for (int i = 0; i <= pieces; ++i) cuts.push_back(a + (b - a) * i / pieces);
    for (double p : breakpoints) {
        if (p > a && p < b) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // the heap is only used to pick the worst piece; totals are re-summed in
    // a fixed order at the end so results do not depend on heap layout
    std::priority_queue<Piece> heap;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Piece p = kronrod15(f, cuts[i], cuts[i + 1]);
        total += p.value;
        error += p.error;
        heap.push(p);
    }
    auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

    while (error > tolerance()) {
        if (static_cast<int>(heap.size()) >= options.max_intervals) {
            throw ConvergenceError("integrate_adaptive: interval budget exhausted", total, error);
        }
        const Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw ConvergenceError("integrate_adaptive: interval underflow", total, error);
        }
        const Piece left = kronrod15(f, worst.a, mid);
        const Piece right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    std::vector<Piece> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece& l, const Piece& r) { return l.a < r.a; });
    AdaptiveResult result;
    result.intervals = static_cast<int>(all.size());
    for (const auto& p : all) {
        result.value += p.value;
        result.error += p.error;
    }
    return result;
}

}  // namespace jointloss::quadrature
