#pragma once

#include <array>
#include <span>
#include <vector>

#include "jointloss/loss/nosub.hpp"
#include "jointloss/model/market.hpp"

namespace jointloss::mc {

/// Loss of one obligor's senior and junior piece for asset value v.
struct TrancheLoss {
    double senior = 0.0;
    double junior = 0.0;
};

/// L^(S) = Theta(F^S - V)(1 - V/F^S); L^(J) = 1 if V < F^S, else
/// Theta(F - V)(1 - (V - F^S)/F^J).
TrancheLoss obligor_loss(double v, const SubordinationSpec& spec);

/// Theta(F - V)(1 - V/F).
double obligor_loss(double v, double face);

/// How draws of V_k(T) become creditor portfolio losses.
struct LossStructure {
    enum class Kind { subordinated, nosub };

    struct Obligor {
        double face = 0.0;
        std::array<double, 2> fraction{};
    };

    Kind kind = Kind::nosub;
    int creditors = 1;
    SubordinationSpec spec;          ///< subordinated: every obligor carries this split
    std::vector<Obligor> obligors;   ///< one per obligor, blocks concatenated
    int junior_atoms = 0;            ///< K for homogeneous subordinated runs

    int size() const noexcept { return static_cast<int>(obligors.size()); }

    /// Homogeneous subordinated portfolio: creditor 0 senior, creditor 1 junior.
    static LossStructure subordinated(const SubordinationSpec& spec, int k_obligors);
    /// Classes expanded to obligors in block order.
    static LossStructure nosub(const NoSubScenario& scenario);
};

/// Per-sample output of evaluate_losses.
struct PortfolioLoss {
    std::array<double, 2> loss{};
    int defaults = 0;             ///< obligors with V < F
    int junior_band = 0;          ///< subordinated: obligors with F^S <= V < F
    int ordering_violations = 0;  ///< subordinated: obligors with L^S > 0 but L^J < 1
};

PortfolioLoss evaluate_losses(std::span<const double> v, const LossStructure& structure);

}  // namespace jointloss::mc
