#include "jointloss/mc/agreement.hpp"

#include <algorithm>
#include <cmath>

#include "jointloss/errors.hpp"

namespace jointloss::mc {

AgreementReport compare_cells(std::span<const double> analytic_mass,
                              std::span<const std::int64_t> counts, std::int64_t n_samples,
                              double cell_area, double density_floor, double z_limit,
                              std::span<const bool> include) {
    if (analytic_mass.size() != counts.size()) {
        throw DomainError("compare_cells: analytic and MC grids differ in size");
    }
    AgreementReport rep;
    rep.n_samples = n_samples;
    rep.density_floor = density_floor;
    rep.z_limit = z_limit;
    std::vector<CellComparison> all;
    const double n = static_cast<double>(n_samples);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!include.empty() && !include[i]) continue;
        const double a = analytic_mass[i];
        if (!(a / cell_area > density_floor)) continue;
        const double p = counts[i] / n;
        const double q = std::max(a, p);
        const double se = std::sqrt(q * (1.0 - q) / n);
        const double z = std::abs(a - p) / std::max(se, 1e-300);
        ++rep.compared;
        if (z <= z_limit) ++rep.within;
        rep.max_z = std::max(rep.max_z, z);
        all.push_back({i, a, p, z});
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.z > y.z; });
    all.resize(std::min<std::size_t>(all.size(), 10));
    rep.worst = std::move(all);
    return rep;
}

nlohmann::json AgreementReport::to_json() const {
    nlohmann::json j;
    j["n_samples"] = n_samples;
    j["density_floor"] = density_floor;
    j["z_limit"] = z_limit;
    j["cells_compared"] = compared;
    j["cells_within"] = within;
    j["max_z"] = max_z;
    j["pass"] = pass();
    for (const auto& w : worst) {
        j["worst"].push_back(
            {{"cell", w.cell}, {"analytic", w.analytic}, {"observed", w.observed}, {"z", w.z}});
    }
    return j;
}

}  // namespace jointloss::mc
