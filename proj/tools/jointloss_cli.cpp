// Scenario-driven front end: run, validate, list-scenarios.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "jointloss/app/runner.hpp"
#include "jointloss/app/scenario.hpp"
#include "jointloss/errors.hpp"
#include "jointloss/parallel.hpp"

namespace {

using nlohmann::json;
using namespace jointloss;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int report_error(int code, const std::string& kind, const std::string& message,
                 const std::string& pointer = {}, json extra = json::object()) {
    json err{{"kind", kind}, {"message", message}, {"exit_code", code}};
    if (!pointer.empty()) err["pointer"] = pointer;
    for (auto& [k, v] : extra.items()) err[k] = v;
    std::cerr << json{{"error", err}}.dump() << '\n';
    return code;
}

// Maps every library exception to an exit code and a JSON report on stderr.
template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const app::ScenarioError& e) {
        return report_error(kExitInput, "schema", e.what(), e.pointer());
    } catch (const app::PartialRunError& e) {
        return report_error(kExitNumeric, e.kind(), e.what(), {},
                            {{"partial_output", e.partial().out_dir.string()}});
    } catch (const ConvergenceError& e) {
        return report_error(kExitNumeric, "convergence", e.what(), {},
                            {{"best_estimate", e.best_estimate()}, {"error_bound", e.error_bound()}});
    } catch (const InconclusiveFitError& e) {
        return report_error(kExitNumeric, "inconclusive_fit", e.what());
    } catch (const UnsupportedDimensionError& e) {
        return report_error(kExitInput, "unsupported_dimension", e.what());
    } catch (const SamplerLimitError& e) {
        return report_error(kExitInput, "sampler_limit", e.what());
    } catch (const SingularCovarianceError& e) {
        return report_error(kExitInput, "singular_covariance", e.what());
    } catch (const UndefinedCorrelationError& e) {
        return report_error(kExitInput, "undefined_correlation", e.what());
    } catch (const DomainError& e) {
        return report_error(kExitInput, "domain", e.what());
    } catch (const json::exception& e) {
        return report_error(kExitInput, "schema", e.what());
    } catch (const std::exception& e) {
        return report_error(1, "internal", e.what());
    }
}

int default_threads() {
    if (const char* env = std::getenv("JOINTLOSS_THREADS"); env && *env) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "ignoring invalid JOINTLOSS_THREADS='" << env << "'\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Joint loss distributions of credit portfolios under fluctuating correlations"};
    cli.require_subcommand(1);
    int threads = default_threads();
    cli.add_option("--threads", threads,
                   "Worker threads (default: JOINTLOSS_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);

    std::string scenario_arg;
    std::vector<std::string> overrides;
    std::string out_dir;

    auto* run = cli.add_subcommand("run", "Run a scenario and write its artifacts");
    run->add_option("scenario", scenario_arg, "Scenario file or bundled scenario name")->required();
    run->add_option("--set", overrides, "Override a leaf, e.g. --set mc.n_samples=10000");
    run->add_option("--out", out_dir, "Output directory (default: output.dir or out/<name>)");

    auto* validate = cli.add_subcommand("validate", "Check a scenario and estimate its cost");
    validate->add_option("scenario", scenario_arg, "Scenario file or bundled scenario name")
        ->required();
    validate->add_option("--set", overrides, "Override a leaf");

    auto* list = cli.add_subcommand("list-scenarios", "List bundled scenarios");

    CLI11_PARSE(cli, argc, argv);
    if (threads > 0) set_worker_count(threads);

    if (*list) {
        return guarded([] {
            std::vector<std::filesystem::path> files;
            const auto dir = app::scenario_dir();
            if (std::filesystem::is_directory(dir))
                for (const auto& e : std::filesystem::directory_iterator(dir))
                    if (e.path().extension() == ".json") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                const auto s = app::load_scenario(f);
                std::cout << f.stem().string() << "  mode=" << s.mode() << '\n';
            }
            return kExitOk;
        });
    }

    return guarded([&] {
        const auto path = app::find_scenario(scenario_arg);
        const auto scenario = app::load_scenario(path, overrides);
        const json report = app::validate_scenario(scenario);
        if (*validate) {
            std::cout << report.dump(2) << '\n';
            return kExitOk;
        }
        const auto dir = out_dir.empty() ? app::default_output_dir(scenario)
                                         : std::filesystem::path(out_dir);
        const auto result = app::run_scenario(scenario, dir, std::cout);
        std::cout << (dir / "manifest.json").string() << "  artifacts="
                  << result.artifacts.size() << " fingerprint=" << scenario.fingerprint << '\n';
        return kExitOk;
    });
}
