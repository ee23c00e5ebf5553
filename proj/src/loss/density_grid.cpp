#include "jointloss/loss/density_grid.hpp"

#include <ostream>

#include "jointloss/errors.hpp"
#include "jointloss/io/csv.hpp"

namespace jointloss {

void Axis::validate() const {
    if (!(hi > lo)) throw DomainError("axis: hi must exceed lo");
    if (cells < 1) throw DomainError("axis: at least one cell required");
}

DensityGrid::DensityGrid(Axis ax, Axis ay) : x(std::move(ax)), y(std::move(ay)) {
    x.validate();
    y.validate();
    values.assign(static_cast<std::size_t>(x.cells) * y.cells, 0.0);
}

void write_csv(const DensityGrid& grid, std::ostream& out) {
    std::vector<std::string> header{grid.x.name, grid.y.name, "density"};
    const bool flagged = !grid.quality.empty();
    if (flagged) header.push_back("quality");
    io::CsvWriter csv(out, header);
    for (int i = 0; i < grid.x.cells; ++i) {
        for (int j = 0; j < grid.y.cells; ++j) {
            std::vector<double> row{grid.x.center(i), grid.y.center(j), grid.at(i, j)};
            if (flagged) row.push_back(grid.quality[static_cast<std::size_t>(i) * grid.y.cells + j]);
            csv.row(row);
        }
    }
}

void write_csv(const Curve& curve, std::ostream& out) {
    std::vector<std::string> header{curve.x_name, curve.y_name};
    const bool flagged = !curve.quality.empty();
    if (flagged) header.push_back("quality");
    io::CsvWriter csv(out, header);
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        std::vector<double> row{curve.x[i], curve.y[i]};
        if (flagged) row.push_back(curve.quality[i]);
        csv.row(row);
    }
}

namespace {
nlohmann::json axis_json(const Axis& a) {
    return {{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"cells", a.cells},
            {"convention", "cell-centered"}};
}
}  // namespace

nlohmann::json to_json(const DensityGrid& grid) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "density_grid";
    j["axes"] = {axis_json(grid.x), axis_json(grid.y)};
    j["metadata"] = grid.metadata;
    j["values"] = grid.values;
    if (!grid.quality.empty()) j["quality"] = grid.quality;
    return j;
}

nlohmann::json to_json(const Curve& curve) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "curve";
    j["columns"] = {curve.x_name, curve.y_name};
    j["metadata"] = curve.metadata;
    j["x"] = curve.x;
    j["y"] = curve.y;
    if (!curve.quality.empty()) j["quality"] = curve.quality;
    return j;
}

}  // namespace jointloss
