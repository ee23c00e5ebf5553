#include "jointloss/model/moments.hpp"

#include <cmath>

#include "jointloss/errors.hpp"
#include "jointloss/model/normal.hpp"

namespace jointloss {

namespace {

void check_node(int j, double z) {
    if (!(z > 0.0)) throw DomainError("moments: z must be positive");
    if (j < 0 || j > 2) throw DomainError("moments: order j must be 0, 1 or 2");
}

// Truncated expectations of X = sqrt(z) V_hat + (mu - rho^2/2)T below the
// threshold of `face`: p0 = P(V < face), e1 = E[e^X; V < face],
// e2 = E[e^{2X}; V < face].
struct Truncated {
    double p0 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
};

struct TruncatedJet {
    Jet p0, e1, e2;
};

struct NodeGeometry {
    double sqrt_z, s, a, drift, h, x;

    NodeGeometry(double face, double z, double u, const MarketParams& p)
        : sqrt_z(std::sqrt(z)),
          s(p.idiosyncratic_scale()),
          a(p.factor_loading()),
          drift(p.log_drift()),
          h(std::log(face / p.v0) - p.log_drift()),
          x((h / sqrt_z + a * u) / s) {}

    // E[X] and Var[X] at the node
    double mean(double u) const { return -sqrt_z * a * u + drift; }
    double var() const { return sqrt_z * sqrt_z * s * s; }
};

// Mills ratio Phi(-t)/phi(t) for t >= 0: erfc directly while exp(t^2/2) stays
// exact enough, the continued fraction further out.
double mills_ratio(double t) {
    if (t < 4.0) return 0.5 * std::erfc(t * M_SQRT1_2) / normal_pdf(t);
    // Modified Lentz on 1/(t + 1/(t + 2/(t + 3/(t + ...)))).
    constexpr double tiny = 1e-300;
    double f = t, c = t, d = 0.0;
    for (int n = 1; n < 500; ++n) {
        d = t + n * d;
        d = d == 0.0 ? tiny : d;
        c = t + n / c;
        c = c == 0.0 ? tiny : c;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

Truncated truncated(double face, double z, double u, const MarketParams& p) {
    if (face <= 0.0) return {};
    const NodeGeometry g(face, z, u, p);
    const double step = g.sqrt_z * g.s;
    Truncated t;
    if (g.x < 0.0) {
        // Deep below the mean the three terms nearly cancel in tau. Writing each
        // as phi(x) times a Mills ratio shares the Gaussian factor exactly, using
        // exp(m + step x) = face/V0.
        const double px = normal_pdf(g.x);
        const double b = face / p.v0;
        t.p0 = px * mills_ratio(-g.x);
        t.e1 = px * b * mills_ratio(step - g.x);
        t.e2 = px * b * b * mills_ratio(2.0 * step - g.x);
        return t;
    }
    const double m = g.mean(u);
    const double v = g.var();
    t.p0 = phi(g.x);
    t.e1 = std::exp(m + 0.5 * v) * phi(g.x - step);
    t.e2 = std::exp(2.0 * m + 2.0 * v) * phi(g.x - 2.0 * step);
    return t;
}

TruncatedJet truncated_jet(double face, double z, double u, const MarketParams& p) {
    if (face <= 0.0) return {};
    const NodeGeometry g(face, z, u, p);
    const double m = g.mean(u);
    const double v = g.var();
    const double step = g.sqrt_z * g.s;
    const double dx_du = g.a / g.s;
    const double dx_dz = -g.h / (2.0 * g.s * z * g.sqrt_z);

    TruncatedJet t;
    const double px = normal_pdf(g.x);
    t.p0 = {phi(g.x), px * dx_dz, px * dx_du};

    for (int k = 1; k <= 2; ++k) {
        const double kk = k;
        const double expo = kk * m + 0.5 * kk * kk * v;
        const double dE_du = -kk * g.sqrt_z * g.a;
        const double dE_dz = -kk * g.a * u / (2.0 * g.sqrt_z) + 0.5 * kk * kk * g.s * g.s;
        const double y = g.x - kk * step;
        const double dy_dz = dx_dz - kk * g.s / (2.0 * g.sqrt_z);
        const double ex = std::exp(expo);
        const double val = ex * phi(y);
        const double py = ex * normal_pdf(y);
        Jet e{val, val * dE_dz + py * dy_dz, val * dE_du + py * dx_du};
        (k == 1 ? t.e1 : t.e2) = e;
    }
    return t;
}

// tau_j from the truncated expectations, using the recombination
// tau2 = -c^2 tau0 + 2 c tau1 + A^2 e2 with A = V0/divisor.
double tau_from(const Truncated& t, int j, double coeff, double scale) {
    const double t0 = t.p0;
    if (j == 0) return t0;
    const double t1 = coeff * t0 - scale * t.e1;
    if (j == 1) return t1;
    return -coeff * coeff * t0 + 2.0 * coeff * t1 + scale * scale * t.e2;
}

std::array<double, 3> taus_from(const Truncated& t, double coeff, double scale) {
    return {tau_from(t, 0, coeff, scale), tau_from(t, 1, coeff, scale),
            tau_from(t, 2, coeff, scale)};
}

}  // namespace

double tau(int j, Tranche iota, Tranche lambda, double z, double u,
           const SubordinationSpec& faces, const MarketParams& params) {
    check_node(j, z);
    const double threshold = lambda == Tranche::senior ? faces.f_senior : faces.total();
    if (threshold <= 0.0) return 0.0;
    const Truncated t = truncated(threshold, z, u, params);
    if (iota == Tranche::senior) {
        if (faces.f_senior <= 0.0) return 0.0;
        return tau_from(t, j, 1.0, params.v0 / faces.f_senior);
    }
    if (!(faces.f_junior > 0.0)) throw DomainError("tau: junior face must be positive");
    return tau_from(t, j, faces.total() / faces.f_junior, params.v0 / faces.f_junior);
}

double moment_senior(int j, double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params) {
    return tau(j, Tranche::senior, Tranche::senior, z, u, faces, params);
}

double moment_junior(int j, double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params) {
    return tau(j, Tranche::junior, Tranche::junior, z, u, faces, params) -
           tau(j, Tranche::junior, Tranche::senior, z, u, faces, params);
}

double moment_plain(int j, double z, double u, double face, const MarketParams& params) {
    check_node(j, z);
    if (!(face > 0.0)) throw DomainError("moment_plain: face must be positive");
    return tau_from(truncated(face, z, u, params), j, 1.0, params.v0 / face);
}

SubordinatedMoments subordinated_moments(double z, double u, const SubordinationSpec& faces,
                                         const MarketParams& params) {
    check_node(0, z);
    if (!(faces.f_junior > 0.0)) throw DomainError("moments: junior face must be positive");
    SubordinatedMoments out;
    const Truncated below_senior = truncated(faces.f_senior, z, u, params);
    const Truncated below_total = truncated(faces.total(), z, u, params);
    if (faces.f_senior > 0.0) out.senior = taus_from(below_senior, 1.0, params.v0 / faces.f_senior);
    const double cj = faces.total() / faces.f_junior;
    const double aj = params.v0 / faces.f_junior;
    const auto upper = taus_from(below_total, cj, aj);
    const auto lower = taus_from(below_senior, cj, aj);
    for (int j = 0; j < 3; ++j) out.junior[j] = upper[j] - lower[j];
    return out;
}

std::array<double, 3> plain_moments(double z, double u, double face, const MarketParams& params) {
    check_node(0, z);
    if (!(face > 0.0)) throw DomainError("plain_moments: face must be positive");
    return taus_from(truncated(face, z, u, params), 1.0, params.v0 / face);
}

namespace {
Jet combine(const Jet& a, double wa, const Jet& b, double wb) {
    return {wa * a.value + wb * b.value, wa * a.d_z + wb * b.d_z, wa * a.d_u + wb * b.d_u};
}
}  // namespace

Jet senior_mean_loss(double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params) {
    check_node(1, z);
    if (faces.f_senior <= 0.0) return {};
    const TruncatedJet t = truncated_jet(faces.f_senior, z, u, params);
    return combine(t.p0, 1.0, t.e1, -params.v0 / faces.f_senior);
}

Jet junior_mean_loss(double z, double u, const SubordinationSpec& faces,
                     const MarketParams& params) {
    check_node(1, z);
    if (!(faces.f_junior > 0.0)) throw DomainError("moments: junior face must be positive");
    const double cj = faces.total() / faces.f_junior;
    const double aj = params.v0 / faces.f_junior;
    const TruncatedJet lo = truncated_jet(faces.f_senior, z, u, params);
    const TruncatedJet hi = truncated_jet(faces.total(), z, u, params);
    // m^(S)_0 + (cj p0_hi - aj e1_hi) - (cj p0_lo - aj e1_lo)
    Jet out = combine(hi.p0, cj, hi.e1, -aj);
    out = combine(out, 1.0, lo.p0, 1.0 - cj);
    return combine(out, 1.0, lo.e1, aj);
}

Jet plain_mean_loss(double z, double u, double face, const MarketParams& params) {
    check_node(1, z);
    if (!(face > 0.0)) throw DomainError("plain_mean_loss: face must be positive");
    const TruncatedJet t = truncated_jet(face, z, u, params);
    return combine(t.p0, 1.0, t.e1, -params.v0 / face);
}

}  // namespace jointloss
