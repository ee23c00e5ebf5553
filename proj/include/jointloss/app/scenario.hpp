#pragma once

#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "jointloss/loss/density_grid.hpp"
#include "jointloss/mc/estimate.hpp"
#include "jointloss/model/market.hpp"
#include "jointloss/quadrature/integrate.hpp"

namespace jointloss::app {

/// Schema violation or invalid parameter in a scenario file. `pointer` is the
/// JSON pointer of the offending value.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& pointer, const std::string& message)
        : std::runtime_error(pointer + ": " + message), pointer_(pointer) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

inline const std::vector<std::string>& modes() {
    static const std::vector<std::string> m{
        "subordinated",  "nosub",       "nosub-multimarket", "limit-subordinated",
        "limit-equal",   "limit-finite-vs-infinite",         "limit-two-markets",
        "no-default",    "correlation-sweep",                "calibrate",
        "mc-validate"};
    return m;
}

/// The complete scenario with every default filled in.
nlohmann::json default_scenario();

/// Merges `user` into the defaults. Unknown keys, type mismatches, unknown
/// modes and a wrong schema_version raise ScenarioError.
nlohmann::json resolve_scenario(const nlohmann::json& user);

/// Applies "dotted.path=value" to a user document; value is parsed as JSON
/// when possible and kept as a string otherwise.
void apply_override(nlohmann::json& user, const std::string& assignment);

struct Scenario {
    nlohmann::json resolved;
    std::string fingerprint;
    std::filesystem::path source;

    const std::string& mode() const { return resolved.at("mode").get_ref<const std::string&>(); }
    std::string name() const { return resolved.at("name").get<std::string>(); }

    MarketParams market() const;
    MultiMarketParams markets() const;
    SubordinationSpec subordination() const;
    OverlapSpec overlap() const;
    std::vector<int> k_values() const;
    quadrature::QuadratureSpec quadrature() const;
    mc::McConfig mc() const;
    Axis axis(const std::string& name) const;
};

/// Reads and resolves a scenario file, applying overrides first.
Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});
Scenario make_scenario(nlohmann::json user, const std::vector<std::string>& overrides = {});

/// Checks every domain invariant the chosen mode relies on and estimates the
/// run cost. Throws ScenarioError on the first violation.
nlohmann::json validate_scenario(const Scenario& scenario);

/// Directory of the bundled scenarios (env JOINTLOSS_SCENARIOS overrides).
std::filesystem::path scenario_dir();
/// Resolves a bundled scenario name to its file, or returns `name_or_path`.
std::filesystem::path find_scenario(const std::string& name_or_path);

}  // namespace jointloss::app
