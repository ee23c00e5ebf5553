#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "jointloss/app/scenario.hpp"
#include "jointloss/mc/agreement.hpp"
#include "jointloss/mc/estimate.hpp"

namespace jointloss::app {

struct ArtifactRecord {
    std::string path;     ///< relative to the output directory
    std::string kind;     ///< grid, curve, table, report
    std::string summary;  ///< key statistic, one line
};

struct RunResult {
    std::filesystem::path out_dir;
    std::vector<ArtifactRecord> artifacts;
    nlohmann::json manifest;
};

/// A run stopped by a convergence or fit failure after writing some
/// artifacts; the manifest is marked partial. Carries the original message.
class PartialRunError : public std::runtime_error {
public:
    PartialRunError(const std::string& what, std::string kind, RunResult partial)
        : std::runtime_error(what), kind_(std::move(kind)), partial_(std::move(partial)) {}
    const std::string& kind() const noexcept { return kind_; }
    const RunResult& partial() const noexcept { return partial_; }

private:
    std::string kind_;
    RunResult partial_;
};

/// Output directory of a scenario: output.dir, or out/<name> when empty.
std::filesystem::path default_output_dir(const Scenario& scenario);

/// Runs the scenario's mode and writes its artifacts plus manifest.json into
/// out_dir. One summary line per artifact goes to `log`.
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       std::ostream& log);

/// Analytic cell masses against an MC histogram of the same scenario.
struct McComparison {
    mc::McRun run;
    Axis axis;
    int dims = 2;                        ///< 1 for single-creditor targets
    bool analytic_available = true;
    std::vector<double> analytic_mass;   ///< per histogram cell
    std::vector<bool> off_lines;         ///< cell does not touch a delta line
    mc::AgreementReport report;          ///< cells off the delta lines
    mc::AgreementReport report_all;      ///< every cell, informational
};

/// The comparison behind mode mc-validate, for validate.target of the scenario
/// and the first portfolio size.
McComparison compare_with_mc(const Scenario& scenario);

}  // namespace jointloss::app
