#include "jointloss/model/market.hpp"

#include <numeric>
#include <string>

#include "jointloss/errors.hpp"

namespace jointloss {

namespace {
void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}
}  // namespace

void MarketParams::validate() const {
    require(std::isfinite(mu), "market: mu must be finite");
    require(rho > 0.0 && std::isfinite(rho), "market: rho must be positive");
    require(c >= 0.0 && c < 1.0, "market: c must lie in [0, 1)");
    require(n_fluct > 0.0 && std::isfinite(n_fluct), "market: n_fluct must be positive");
    require(t_mat > 0.0 && std::isfinite(t_mat), "market: t_mat must be positive");
    require(v0 > 0.0 && std::isfinite(v0), "market: v0 must be positive");
}

int MultiMarketParams::total_size() const noexcept {
    return std::accumulate(blocks.begin(), blocks.end(), 0,
                           [](int acc, const MarketBlock& b) { return acc + b.size; });
}

void MultiMarketParams::validate() const {
    require(!blocks.empty(), "markets: at least one block required");
    require(n_fluct > 0.0, "markets: n_fluct must be positive");
    for (const auto& b : blocks) {
        b.params.validate();
        require(b.size >= 1, "markets: block size must be >= 1");
        require(b.params.n_fluct == n_fluct, "markets: blocks must share n_fluct");
    }
}

MultiMarketParams MultiMarketParams::single(const MarketParams& params, int size) {
    return {.blocks = {{params, size}}, .n_fluct = params.n_fluct};
}

void SubordinationSpec::validate() const {
    require(f_senior >= 0.0 && std::isfinite(f_senior), "subordination: f_senior must be >= 0");
    require(f_junior > 0.0 && std::isfinite(f_junior), "subordination: f_junior must be > 0");
}

void OverlapSpec::validate() const {
    require(r1 >= 0.0 && r12 >= 0.0, "overlap: fractions must be nonnegative");
    require(r1 + r12 <= 1.0 + 1e-12, "overlap: overlap fractions exceed 1");
    require(gamma >= 0.0 && gamma <= 1.0, "overlap: gamma must lie in [0, 1]");
    require(f0 > 0.0, "overlap: f0 must be positive");
    // each creditor needs a positive total face value
    require(r1 + gamma * r12 > 0.0, "overlap: creditor one holds no face value");
    require(1.0 - r1 - gamma * r12 > 0.0, "overlap: creditor two holds no face value");
}

DefaultThreshold default_threshold(double face, const MarketParams& params, double z) {
    if (!(face > 0.0)) throw DomainError("default_threshold: face must be positive");
    if (!(z > 0.0)) throw DomainError("default_threshold: z must be positive");
    const double f_hat = (std::log(face / params.v0) - params.log_drift()) / std::sqrt(z);
    return {f_hat, face, z, params};
}

}  // namespace jointloss
