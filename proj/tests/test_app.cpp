#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "jointloss/app/runner.hpp"
#include "jointloss/app/scenario.hpp"
#include "jointloss/parallel.hpp"

using namespace jointloss;
using namespace jointloss::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string pointer_of(const json& user) {
    try {
        const Scenario s = make_scenario(user);
        validate_scenario(s);
    } catch (const ScenarioError& e) {
        return e.pointer();
    }
    return "";
}

std::string message_of(const json& user) {
    try {
        validate_scenario(make_scenario(user));
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("jointloss_test_" + name);
    fs::remove_all(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(JOINTLOSS_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("defaults resolve and fingerprints are stable") {
    const Scenario a = make_scenario(json::object());
    const Scenario b = make_scenario(json::object());
    CHECK(a.fingerprint == b.fingerprint);
    CHECK(a.fingerprint.size() == 16u);
    CHECK(a.resolved.at("schema_version") == kSchemaVersion);
    CHECK(make_scenario({{"name", "other"}}).fingerprint != a.fingerprint);
}

TEST_CASE("schema violations carry JSON pointers") {
    CHECK(pointer_of({{"market", {{"foo", 1}}}}) == "/market/foo");
    CHECK(pointer_of({{"bogus", 1}}) == "/bogus");
    CHECK(pointer_of({{"market", {{"mu", "fast"}}}}) == "/market/mu");
    CHECK(pointer_of({{"portfolio", {{"k_obligors", {10, 2.5}}}}}) == "/portfolio/k_obligors/1");
    CHECK(pointer_of({{"mode", "plot"}}) == "/mode");
    CHECK(pointer_of({{"schema_version", 2}}) == "/schema_version");
    CHECK(pointer_of({{"markets", {{{"size", 3}, {"nope", 1}}}}}) == "/markets/0/nope");
    CHECK(pointer_of({{"market", {{"rho", -1.0}}}}) == "/market");
}

TEST_CASE("validation enforces the documented invariants") {
    const json overlap{{"mode", "nosub"},
                       {"portfolio", {{"overlap", {{"r1", 0.8}, {"r12", 0.4}}}}}};
    CHECK(message_of(overlap).find("overlap fractions exceed 1") != std::string::npos);

    json six{{"mode", "nosub-multimarket"}, {"portfolio", {{"creditors", 1}}}};
    six["markets"] = json::array();
    for (int i = 0; i < 6; ++i) six["markets"].push_back({{"size", 10}});
    const std::string msg = message_of(six);
    CHECK(msg.find("mc-validate") != std::string::npos);
    six["mode"] = "mc-validate";
    six["validate"] = {{"target", "nosub-multimarket"}};
    CHECK(message_of(six).empty());

    CHECK(pointer_of({{"mode", "limit-equal"}, {"market", {{"c", 0.0}}}}) == "/market/c");
    CHECK(pointer_of({{"quadrature", {{"mode", "magic"}}}}) == "/quadrature/mode");
}

TEST_CASE("dotted overrides") {
    json user = json::object();
    apply_override(user, "mc.n_samples=1000");
    apply_override(user, "portfolio.k_obligors=[5, 6]");
    apply_override(user, "name=abc");
    apply_override(user, "quadrature.mode=adaptive");
    const Scenario s = make_scenario(user);
    CHECK(s.mc().n_samples == 1000);
    CHECK(s.k_values() == std::vector<int>{5, 6});
    CHECK(s.name() == "abc");
    CHECK(s.quadrature().mode == quadrature::Mode::adaptive);
    CHECK_THROWS_AS(apply_override(user, "novalue"), ScenarioError);
    CHECK_THROWS_AS(make_scenario(json::object(), {"mc.bins=x"}), ScenarioError);
}

TEST_CASE("every bundled scenario validates with a cost estimate") {
    int count = 0;
    for (const auto& e : fs::directory_iterator(scenario_dir())) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        const Scenario s = load_scenario(e.path());
        const json report = validate_scenario(s);
        CHECK(report.at("status") == "ok");
        CHECK(report.at("cost").at("estimated_seconds_single_core").get<double>() >= 0.0);
        CHECK(s.name() == e.path().stem().string());
        ++count;
    }
    CHECK(count >= 10);
}

TEST_CASE("reruns are byte-identical for any worker count") {
    const std::vector<std::string> small{"grid.cells=21", "mc.n_samples=20000", "mc.bins=20"};
    for (const char* name : {"fig3_nosub_equal", "mc_validate_subordinated", "no_default"}) {
        CAPTURE(name);
        auto overrides = small;
        if (std::string(name) == "no_default") overrides.push_back("portfolio.k_obligors=[1, 10]");
        const Scenario s = load_scenario(find_scenario(name), overrides);
        const fs::path d1 = temp_dir(std::string(name) + "_1"), d2 = temp_dir(std::string(name) + "_2");
        std::ostringstream log;
        const int saved = worker_count();
        set_worker_count(1);
        const RunResult r1 = run_scenario(s, d1, log);
        set_worker_count(4);
        const RunResult r2 = run_scenario(s, d2, log);
        set_worker_count(saved);
        REQUIRE(r1.artifacts.size() == r2.artifacts.size());
        for (const auto& e : fs::directory_iterator(d1)) {
            CAPTURE(e.path().filename().string());
            CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
        }
        const json manifest = json::parse(slurp(d1 / "manifest.json"));
        CHECK(manifest.at("scenario_fingerprint") == s.fingerprint);
        CHECK(manifest.at("scenario") == s.resolved);
        CHECK(manifest.at("status") == "complete");
        fs::remove_all(d1);
        fs::remove_all(d2);
    }
}

TEST_CASE("mc-validate always writes an agreement report") {
    const Scenario s = load_scenario(find_scenario("mc_validate_nosub"),
                                     {"mc.n_samples=20000", "mc.bins=20"});
    const fs::path d = temp_dir("agreement");
    std::ostringstream log;
    run_scenario(s, d, log);
    const json report = json::parse(slurp(d / "agreement.json"));
    CHECK(report.at("report").at("agreement").contains("max_z"));
    CHECK(report.at("metadata").at("scenario_fingerprint") == s.fingerprint);
    CHECK(log.str().find("agreement.json") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("command-line exit codes") {
    const fs::path d = temp_dir("cli");
    fs::create_directories(d);
    CHECK(run_cli("validate fig3_nosub_equal") == 0);
    CHECK(run_cli("list-scenarios") == 0);
    {
        std::ofstream(d / "bad.json") << R"({"mode": "nosub", "colour": "red"})";
    }
    CHECK(run_cli("validate " + (d / "bad.json").string()) == 2);
    CHECK(run_cli("run " + (d / "bad.json").string()) == 2);
    CHECK(run_cli("validate fig3_nosub_equal --set portfolio.overlap.r1=0.8 "
                  "--set portfolio.overlap.r12=0.4") == 2);
    CHECK(run_cli("run limit_equal --set grid.cells=5 --out " + (d / "ok").string()) == 0);
    CHECK(fs::exists(d / "ok" / "manifest.json"));
    CHECK(run_cli("run subordinated_k200 --set quadrature.mode=adaptive --set quadrature.rel_tol=1e-16 "
                  "--out " + (d / "conv").string()) == 3);
    const json partial = json::parse(slurp(d / "conv" / "manifest.json"));
    CHECK(partial.at("status") == "partial");
    CHECK(partial.at("error").at("kind") == "convergence");
    fs::remove_all(d);
}

}  // TEST_SUITE
