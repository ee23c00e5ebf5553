#pragma once

#include <cstdint>
#include <json.hpp>
#include <span>
#include <vector>

namespace jointloss::mc {

struct CellComparison {
    std::size_t cell = 0;
    double analytic = 0.0;  ///< probability mass of the cell
    double observed = 0.0;  ///< MC frequency
    double z = 0.0;
};

/// Analytic cell masses against MC counts. Cells are compared where the
/// analytic density (mass / cell_area) exceeds `density_floor`. The binomial
/// standard error uses max(analytic, observed) so that empty MC cells still
/// get a usable error.
struct AgreementReport {
    std::int64_t n_samples = 0;
    double density_floor = 0.0;
    int compared = 0;
    int within = 0;
    double max_z = 0.0;
    double z_limit = 3.0;
    std::vector<CellComparison> worst;  ///< largest z first, at most 10

    bool pass() const noexcept { return compared > 0 && within == compared; }
    nlohmann::json to_json() const;
};

AgreementReport compare_cells(std::span<const double> analytic_mass,
                              std::span<const std::int64_t> counts, std::int64_t n_samples,
                              double cell_area, double density_floor = 1e-3, double z_limit = 3.0,
                              std::span<const bool> include = {});

}  // namespace jointloss::mc
