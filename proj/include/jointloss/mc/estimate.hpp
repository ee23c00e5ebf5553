#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <vector>

#include "jointloss/loss/density_grid.hpp"
#include "jointloss/mc/losses.hpp"
#include "jointloss/model/market.hpp"

namespace jointloss::mc {

enum class SamplerKind { compound, wishart };

struct McConfig {
    std::int64_t n_samples = 1'000'000;
    std::uint64_t rng_seed = 20130501;
    SamplerKind sampler = SamplerKind::compound;
    bool antithetic = false;
    int histogram_bins = 50;           ///< per axis over [0, 1]
    std::vector<double> tail_thresholds;
    bool keep_samples = false;

    /// Throws DomainError for n_samples < 1 or histogram_bins < 1.
    void validate() const;
    /// Acceptance-grade estimates need at least 1e4 samples.
    bool acceptance_grade() const noexcept { return n_samples >= 10'000; }
};

struct McProblem {
    MultiMarketParams markets;
    LossStructure structure;
};

/// Mean with its standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct CreditorSummary {
    Estimate mean;
    double variance = 0.0;
    Estimate zero_mass;              ///< P(L == 0), the delta line at zero
    std::vector<Estimate> tails;     ///< P(L > t) for each configured threshold
};

struct McRun {
    McConfig config;
    std::int64_t n = 0;
    int creditors = 1;
    std::array<CreditorSummary, 2> creditor{};
    Estimate correlation;            ///< Pearson correlation of (L1, L2); SE from batch means
    Estimate no_default;             ///< P(no obligor defaults)
    std::vector<Estimate> junior_atoms;  ///< P(no junior-band default and L^J = k/K), k = 0..K
    std::int64_t ordering_violations = 0;   ///< samples with L^S > L^J
    std::int64_t obligor_ordering_violations = 0;
    Axis hist_axis;
    std::vector<std::int64_t> histogram_all;         ///< every sample, x-major
    std::vector<std::int64_t> histogram_continuous;  ///< samples off every delta line
    std::vector<std::array<double, 2>> samples;      ///< only with keep_samples

    nlohmann::json summary() const;
};

/// Runs the Monte Carlo oracle. Samples are generated in fixed-size chunks,
/// each with its own seed_seq{seed, chunk} stream, and merged in chunk order,
/// so results are bit-identical for any worker count.
McRun estimate(const McProblem& problem, const McConfig& config);

}  // namespace jointloss::mc
