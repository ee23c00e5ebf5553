#include "jointloss/mc/losses.hpp"

#include "jointloss/errors.hpp"

namespace jointloss::mc {

TrancheLoss obligor_loss(double v, const SubordinationSpec& spec) {
    const double total = spec.total();
    if (v >= total) return {};
    if (v < spec.f_senior) return {1.0 - v / spec.f_senior, 1.0};
    return {0.0, 1.0 - (v - spec.f_senior) / spec.f_junior};
}

double obligor_loss(double v, double face) { return v < face ? 1.0 - v / face : 0.0; }

LossStructure LossStructure::subordinated(const SubordinationSpec& spec, int k_obligors) {
    spec.validate();
    if (k_obligors < 1) throw DomainError("loss structure: K must be positive");
    LossStructure s;
    s.kind = Kind::subordinated;
    s.creditors = 2;
    s.spec = spec;
    s.junior_atoms = k_obligors;
    const double f = 1.0 / k_obligors;
    s.obligors.assign(k_obligors, {spec.total(), {f, f}});
    return s;
}

LossStructure LossStructure::nosub(const NoSubScenario& scenario) {
    scenario.validate();
    LossStructure s;
    s.kind = Kind::nosub;
    s.creditors = scenario.creditors;
    for (int m = 0; m < scenario.markets.beta(); ++m) {
        for (const auto& c : scenario.classes) {
            if (c.market != m) continue;
            for (int i = 0; i < c.count; ++i) s.obligors.push_back({c.face, c.fraction});
        }
    }
    return s;
}

PortfolioLoss evaluate_losses(std::span<const double> v, const LossStructure& structure) {
    if (static_cast<int>(v.size()) != structure.size()) {
        throw DomainError("evaluate_losses: draw size does not match the portfolio");
    }
    PortfolioLoss out;
    if (structure.kind == LossStructure::Kind::subordinated) {
        const auto& spec = structure.spec;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (v[k] >= spec.total()) continue;
            const TrancheLoss l = obligor_loss(v[k], spec);
            const auto& f = structure.obligors[k].fraction;
            out.loss[0] += f[0] * l.senior;
            out.loss[1] += f[1] * l.junior;
            ++out.defaults;
            if (l.senior == 0.0) ++out.junior_band;
            if (l.senior > 0.0 && l.junior < 1.0) ++out.ordering_violations;
        }
        return out;
    }
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto& o = structure.obligors[k];
        if (v[k] >= o.face) continue;
        const double l = 1.0 - v[k] / o.face;
        out.loss[0] += o.fraction[0] * l;
        out.loss[1] += o.fraction[1] * l;
        ++out.defaults;
    }
    return out;
}

}  // namespace jointloss::mc
