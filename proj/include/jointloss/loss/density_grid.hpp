#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

namespace jointloss {

inline constexpr int kSchemaVersion = 1;

/// Uniform cell-centered axis over [lo, hi].
struct Axis {
    std::string name = "l";
    double lo = 0.0;
    double hi = 1.0;
    int cells = 101;

    void validate() const;
    double width() const noexcept { return (hi - lo) / cells; }
    double edge(int i) const noexcept { return lo + (hi - lo) * i / cells; }
    double center(int i) const noexcept { return lo + (hi - lo) * (i + 0.5) / cells; }
};

/// Density values per unit loss^2 at cell centers, x-major.
struct DensityGrid {
    Axis x{"l1"};
    Axis y{"l2"};
    std::vector<double> values;
    std::vector<int> quality;  ///< optional solver flag per point; empty when unused
    nlohmann::json metadata = nlohmann::json::object();

    DensityGrid() = default;
    DensityGrid(Axis ax, Axis ay);

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * y.cells + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * y.cells + j]; }
};

/// Sampled curve y(x), e.g. a marginal density or a correlation sweep column.
struct Curve {
    std::string x_name = "l";
    std::string y_name = "density";
    std::vector<double> x;
    std::vector<double> y;
    std::vector<int> quality;
    nlohmann::json metadata = nlohmann::json::object();
};

/// CSV with header "x,y,density" (plus "quality" when present), 17 significant digits.
void write_csv(const DensityGrid& grid, std::ostream& out);
void write_csv(const Curve& curve, std::ostream& out);

/// Versioned JSON envelope with axes, metadata and values.
nlohmann::json to_json(const DensityGrid& grid);
nlohmann::json to_json(const Curve& curve);

}  // namespace jointloss
