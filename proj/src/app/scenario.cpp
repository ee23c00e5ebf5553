#include "jointloss/app/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jointloss/errors.hpp"
#include "jointloss/io/fingerprint.hpp"
#include "jointloss/loss/nosub.hpp"

#ifndef JOINTLOSS_SCENARIO_DIR
#define JOINTLOSS_SCENARIO_DIR "scenarios"
#endif

namespace jointloss::app {

using nlohmann::json;

namespace {

json market_json(const MarketParams& p) {
    return {{"mu", p.mu}, {"rho", p.rho}, {"c", p.c},
            {"n_fluct", p.n_fluct}, {"t_mat", p.t_mat}, {"v0", p.v0}};
}

// Template for one element of "markets"; n_fluct is shared and lives in "market".
json market_block_template() {
    json m = market_json(MarketParams::empirical());
    m.erase("n_fluct");
    m["size"] = 50;
    return m;
}

std::string type_name(const json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number_float()) return "number";
    return v.type_name();
}

// Recursively checks `user` against `schema` and merges it into `out`.
void merge(const json& schema, const json& user, json& out, const std::string& ptr) {
    if (schema.is_object()) {
        if (!user.is_object()) throw ScenarioError(ptr.empty() ? "/" : ptr, "expected object");
        for (const auto& [key, value] : user.items()) {
            const std::string child = ptr + "/" + key;
            if (!schema.contains(key)) throw ScenarioError(child, "unknown field");
            merge(schema.at(key), value, out[key], child);
        }
        return;
    }
    if (schema.is_number_float()) {
        if (!user.is_number()) throw ScenarioError(ptr, "expected number, got " + type_name(user));
        out = user.get<double>();
        return;
    }
    if (schema.is_number_integer() || schema.is_number_unsigned()) {
        if (user.is_number_float() && std::floor(user.get<double>()) == user.get<double>() &&
            std::abs(user.get<double>()) < 9e15) {
            out = static_cast<std::int64_t>(user.get<double>());
            return;
        }
        if (!user.is_number_integer() && !user.is_number_unsigned())
            throw ScenarioError(ptr, "expected integer, got " + type_name(user));
        out = user;
        return;
    }
    if (schema.is_array()) {
        if (!user.is_array()) throw ScenarioError(ptr, "expected array, got " + type_name(user));
        out = json::array();
        if (ptr == "/markets") {
            const json tmpl = market_block_template();
            for (std::size_t i = 0; i < user.size(); ++i) {
                json element = tmpl;
                merge(tmpl, user[i], element, ptr + "/" + std::to_string(i));
                out.push_back(element);
            }
            return;
        }
        // Homogeneous arrays: the schema stores one prototype element.
        const json& proto = schema.empty() ? json(0.0) : schema.front();
        for (std::size_t i = 0; i < user.size(); ++i) {
            json element = proto;
            merge(proto, user[i], element, ptr + "/" + std::to_string(i));
            out.push_back(element);
        }
        return;
    }
    if (schema.is_string()) {
        if (!user.is_string()) throw ScenarioError(ptr, "expected string, got " + type_name(user));
        out = user;
        return;
    }
    if (schema.is_boolean()) {
        if (!user.is_boolean()) throw ScenarioError(ptr, "expected boolean, got " + type_name(user));
        out = user;
        return;
    }
    throw ScenarioError(ptr, "field is not configurable");
}

// Schema prototypes for arrays whose default is empty.
json schema_of(const json& defaults) {
    json s = defaults;
    s["markets"] = json::array({market_block_template()});
    s["portfolio"]["k_obligors"] = json::array({1});
    s["sweep"]["c_values"] = json::array({0.0});
    s["sweep"]["mu_values"] = json::array({0.0});
    s["mc"]["tail_thresholds"] = json::array({0.0});
    return s;
}

template <class T>
T get(const json& j, const char* key) {
    return j.at(key).get<T>();
}

void require(bool ok, const std::string& ptr, const std::string& message) {
    if (!ok) throw ScenarioError(ptr, message);
}

// Converts a domain exception from a validate() call into a pointered error.
template <class F>
void check(const std::string& ptr, F&& f) {
    try {
        f();
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(ptr, e.what());
    }
}

}  // namespace

json default_scenario() {
    json s;
    s["schema_version"] = kSchemaVersion;
    s["name"] = "scenario";
    s["mode"] = "subordinated";
    s["market"] = market_json(MarketParams::empirical());
    s["markets"] = json::array();
    s["portfolio"] = {{"k_obligors", json::array({100})},
                      {"f0", 75.0},
                      {"overlap", {{"r1", 0.5}, {"r12", 0.0}, {"gamma", 0.5}}},
                      {"creditors", 2},
                      {"r1_obligors", 10}};
    s["subordination"] = {{"f_senior", 37.0}, {"f_junior", 38.0}};
    s["quadrature"] = {{"z_nodes", 128}, {"u_nodes", 128}, {"mode", "fixed"}, {"rel_tol", 1e-6}};
    s["grid"] = {{"cells", 101}, {"lo", 0.0}, {"hi", 1.0}};
    s["sweep"] = {{"c_values", json::array()},
                  {"mu_values", json::array()},
                  {"method", "monte-carlo"},
                  {"compare_mc", false}};
    s["calibrate"] = {{"input_csv", ""},
                      {"synthetic",
                       {{"n_fluct", 6.0}, {"c", 0.28}, {"k", 20}, {"m", 5000}, {"seed", 7}}}};
    s["mc"] = {{"n_samples", 1000000},
               {"seed", 20130501},
               {"sampler", "compound"},
               {"antithetic", false},
               {"bins", 50},
               {"tail_thresholds", json::array()}};
    s["validate"] = {{"target", "subordinated"}, {"density_floor", 1e-3}, {"z_limit", 3.0}};
    s["output"] = {{"dir", ""}};
    return s;
}

json resolve_scenario(const json& user) {
    json out = default_scenario();
    const json schema = schema_of(out);
    if (!user.is_object()) throw ScenarioError("/", "scenario must be a JSON object");
    if (user.contains("schema_version")) {
        const json& v = user.at("schema_version");
        if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
            throw ScenarioError("/schema_version",
                                "unsupported schema version (expected " +
                                    std::to_string(kSchemaVersion) + ")");
    }
    merge(schema, user, out, "");
    const auto& mode = out.at("mode").get_ref<const std::string&>();
    if (std::find(modes().begin(), modes().end(), mode) == modes().end())
        throw ScenarioError("/mode", "unknown mode '" + mode + "'");
    return out;
}

void apply_override(json& user, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ScenarioError("/", "override '" + assignment + "' is not of the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    std::vector<std::string> parts;
    std::string ptr;
    std::stringstream walk(path);
    std::string part;
    while (std::getline(walk, part, '.')) {
        if (part.empty()) throw ScenarioError("/", "empty component in override '" + path + "'");
        parts.push_back(part);
        ptr += "/" + part;
    }
    if (parts.empty()) throw ScenarioError("/", "empty override path");
    // Intermediate objects are created; an array index must name an existing element.
    json* node = &user;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (node->is_array()) {
            const auto idx = std::stoul(parts[i]);
            if (idx >= node->size()) throw ScenarioError(ptr, "array index out of range");
            node = &(*node)[idx];
        } else {
            if (!node->is_object()) throw ScenarioError(ptr, "cannot descend into a scalar");
            node = &(*node)[parts[i]];
            if (node->is_null()) *node = json::object();
        }
    }
    if (node->is_array()) {
        const auto idx = std::stoul(parts.back());
        if (idx >= node->size()) throw ScenarioError(ptr, "array index out of range");
        (*node)[idx] = value;
    } else {
        (*node)[parts.back()] = value;
    }
}

Scenario make_scenario(json user, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) apply_override(user, o);
    Scenario s;
    s.resolved = resolve_scenario(user);
    s.fingerprint = io::fingerprint(s.resolved);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("/", "cannot read scenario file " + path.string());
    json user = json::parse(in, nullptr, false, true);
    if (user.is_discarded()) throw ScenarioError("/", "malformed JSON in " + path.string());
    Scenario s = make_scenario(std::move(user), overrides);
    s.source = path;
    return s;
}

MarketParams Scenario::market() const {
    const json& m = resolved.at("market");
    return {.mu = get<double>(m, "mu"),
            .rho = get<double>(m, "rho"),
            .c = get<double>(m, "c"),
            .n_fluct = get<double>(m, "n_fluct"),
            .t_mat = get<double>(m, "t_mat"),
            .v0 = get<double>(m, "v0")};
}

MultiMarketParams Scenario::markets() const {
    MultiMarketParams mm;
    mm.n_fluct = market().n_fluct;
    for (const json& b : resolved.at("markets")) {
        MarketParams p{.mu = get<double>(b, "mu"),
                       .rho = get<double>(b, "rho"),
                       .c = get<double>(b, "c"),
                       .n_fluct = mm.n_fluct,
                       .t_mat = get<double>(b, "t_mat"),
                       .v0 = get<double>(b, "v0")};
        mm.blocks.push_back({p, get<int>(b, "size")});
    }
    return mm;
}

SubordinationSpec Scenario::subordination() const {
    const json& s = resolved.at("subordination");
    return {get<double>(s, "f_senior"), get<double>(s, "f_junior")};
}

OverlapSpec Scenario::overlap() const {
    const json& p = resolved.at("portfolio");
    const json& o = p.at("overlap");
    return {get<double>(o, "r1"), get<double>(o, "r12"), get<double>(o, "gamma"),
            get<double>(p, "f0")};
}

std::vector<int> Scenario::k_values() const {
    return resolved.at("portfolio").at("k_obligors").get<std::vector<int>>();
}

quadrature::QuadratureSpec Scenario::quadrature() const {
    const json& q = resolved.at("quadrature");
    quadrature::QuadratureSpec spec;
    spec.z_nodes = get<int>(q, "z_nodes");
    spec.u_nodes = get<int>(q, "u_nodes");
    const auto mode = get<std::string>(q, "mode");
    if (mode == "fixed")
        spec.mode = quadrature::Mode::fixed_rule;
    else if (mode == "adaptive")
        spec.mode = quadrature::Mode::adaptive;
    else
        throw ScenarioError("/quadrature/mode", "expected 'fixed' or 'adaptive'");
    spec.rel_tol = get<double>(q, "rel_tol");
    return spec;
}

mc::McConfig Scenario::mc() const {
    const json& m = resolved.at("mc");
    mc::McConfig c;
    c.n_samples = get<std::int64_t>(m, "n_samples");
    c.rng_seed = get<std::uint64_t>(m, "seed");
    const auto sampler = get<std::string>(m, "sampler");
    if (sampler == "compound")
        c.sampler = mc::SamplerKind::compound;
    else if (sampler == "wishart")
        c.sampler = mc::SamplerKind::wishart;
    else
        throw ScenarioError("/mc/sampler", "expected 'compound' or 'wishart'");
    c.antithetic = get<bool>(m, "antithetic");
    c.histogram_bins = get<int>(m, "bins");
    c.tail_thresholds = m.at("tail_thresholds").get<std::vector<double>>();
    return c;
}

Axis Scenario::axis(const std::string& name) const {
    const json& g = resolved.at("grid");
    return {name, get<double>(g, "lo"), get<double>(g, "hi"), get<int>(g, "cells")};
}

namespace {

void check_market(const MarketParams& p, const std::string& ptr) {
    check(ptr, [&] { p.validate(); });
}

void check_k(const Scenario& s, int min_k) {
    const auto ks = s.k_values();
    require(!ks.empty(), "/portfolio/k_obligors", "at least one portfolio size required");
    for (std::size_t i = 0; i < ks.size(); ++i)
        require(ks[i] >= min_k, "/portfolio/k_obligors/" + std::to_string(i),
                "portfolio size must be at least " + std::to_string(min_k));
}

void check_markets(const Scenario& s, std::size_t min_count, bool analytic) {
    const json& arr = s.resolved.at("markets");
    require(arr.size() >= min_count, "/markets",
            "mode needs at least " + std::to_string(min_count) + " market block(s)");
    const auto mm = s.markets();
    for (std::size_t i = 0; i < mm.blocks.size(); ++i) {
        check_market(mm.blocks[i].params, "/markets/" + std::to_string(i));
        require(mm.blocks[i].size >= 1, "/markets/" + std::to_string(i) + "/size",
                "block size must be positive");
    }
    if (analytic)
        require(mm.beta() <= quadrature::kMaxTensorFactors, "/markets",
                "tensor quadrature supports at most " +
                    std::to_string(quadrature::kMaxTensorFactors) +
                    " markets; use mode mc-validate for larger beta");
}

double quad_nodes(const quadrature::QuadratureSpec& q, int beta) {
    return q.z_nodes * std::pow(static_cast<double>(q.u_nodes), beta);
}

}  // namespace

json validate_scenario(const Scenario& s) {
    const std::string& mode = s.mode();
    const MarketParams market = s.market();
    check_market(market, "/market");
    const auto quad = s.quadrature();
    check("/quadrature", [&] { quad.validate(); });
    const Axis ax = s.axis("l1");
    check("/grid", [&] { ax.validate(); });
    const auto mc = s.mc();
    check("/mc", [&] { mc.validate(); });
    const double cells = static_cast<double>(ax.cells) * ax.cells;

    json report;
    report["mode"] = mode;
    report["fingerprint"] = s.fingerprint;
    report["schema_version"] = kSchemaVersion;
    double node_evals = 0.0;
    double mc_draws = 0.0;
    json notes = json::array();

    const auto ks = s.k_values();
    const auto overlap_check = [&] {
        const auto ov = s.overlap();
        check("/portfolio/overlap", [&] { ov.validate(); });
        for (std::size_t i = 0; i < ks.size(); ++i)
            check("/portfolio/k_obligors/" + std::to_string(i),
                  [&] { NoSubScenario::overlap(ov, ks[i], market).validate(); });
    };

    if (mode == "subordinated" || mode == "limit-subordinated" ||
        (mode == "mc-validate" && s.resolved.at("validate").at("target") == "subordinated")) {
        check("/subordination", [&] { s.subordination().validate(); });
        if (mode != "limit-subordinated") {
            check_k(s, 2);
            for (int k : ks) {
                if (k < 8) notes.push_back("K = " + std::to_string(k) +
                                           " < 8: Gaussian approximation is coarse");
                if (k > 1000 && quad.mode == quadrature::Mode::fixed_rule)
                    notes.push_back("K = " + std::to_string(k) +
                                    ": fixed nodes under-resolve the narrow conditional laws; "
                                    "use quadrature.mode = adaptive");
            }
        }
        if (mode == "limit-subordinated")
            require(market.c > 0.0, "/market/c", "limit densities need c > 0");
    }
    if (mode == "subordinated") {
        node_evals = ks.size() * (quad_nodes(quad, 1) * (1.0 + cells / 50.0));
    } else if (mode == "nosub") {
        check_k(s, 2);
        overlap_check();
        node_evals = ks.size() * quad_nodes(quad, 1) * (1.0 + cells / 50.0);
    } else if (mode == "nosub-multimarket") {
        check_markets(s, 1, true);
        const int creditors = s.resolved.at("portfolio").at("creditors").get<int>();
        require(creditors == 1 || creditors == 2, "/portfolio/creditors", "expected 1 or 2");
        if (creditors == 2)
            require(s.markets().beta() == 2, "/markets",
                    "two creditors in multimarket mode need exactly two markets");
        node_evals = quad_nodes(quad, s.markets().beta()) * (1.0 + cells / 50.0);
    } else if (mode == "limit-subordinated") {
        node_evals = cells * 96.0;
    } else if (mode == "limit-equal" || mode == "limit-finite-vs-infinite") {
        require(market.c > 0.0, "/market/c", "limit densities need c > 0");
        require(s.resolved.at("portfolio").at("f0").get<double>() > 0.0, "/portfolio/f0",
                "face value must be positive");
        if (mode == "limit-finite-vs-infinite")
            require(s.resolved.at("portfolio").at("r1_obligors").get<int>() >= 1,
                    "/portfolio/r1_obligors", "finite portfolio needs at least one obligor");
        node_evals = (mode == "limit-equal" ? ax.cells : cells) * 200.0;
    } else if (mode == "limit-two-markets") {
        check_markets(s, 2, true);
        require(s.markets().beta() == 2, "/markets", "exactly two markets required");
        for (const auto& b : s.markets().blocks)
            require(b.params.c > 0.0, "/markets", "limit densities need c > 0 in every market");
        node_evals = cells * 200.0;
    } else if (mode == "no-default") {
        check_k(s, 1);
        require(s.resolved.at("portfolio").at("f0").get<double>() > 0.0, "/portfolio/f0",
                "face value must be positive");
        const auto mus = s.resolved.at("sweep").at("mu_values");
        node_evals = ks.size() * std::max<std::size_t>(1, mus.size()) * quad_nodes(quad, 1);
        if (s.resolved.at("sweep").at("compare_mc").get<bool>()) {
            double total = 0.0;
            for (int k : ks) total += k;
            mc_draws = total * std::max<std::size_t>(1, mus.size()) * mc.n_samples;
        }
    } else if (mode == "correlation-sweep") {
        check_k(s, 2);
        overlap_check();
        const auto cs = s.resolved.at("sweep").at("c_values").get<std::vector<double>>();
        require(!cs.empty(), "/sweep/c_values", "at least one c value required");
        for (std::size_t i = 0; i < cs.size(); ++i)
            require(cs[i] >= 0.0 && cs[i] < 1.0, "/sweep/c_values/" + std::to_string(i),
                    "c must lie in [0, 1)");
        const auto method = s.resolved.at("sweep").at("method").get<std::string>();
        require(method == "monte-carlo" || method == "moments", "/sweep/method",
                "expected 'monte-carlo' or 'moments'");
        node_evals = cs.size() * ks.size() * quad_nodes(quad, 1);
        if (method == "monte-carlo") {
            double total = 0.0;
            for (int k : ks) total += k;
            mc_draws = total * cs.size() * mc.n_samples;
        }
    } else if (mode == "calibrate") {
        const json& cal = s.resolved.at("calibrate");
        if (cal.at("input_csv").get<std::string>().empty()) {
            const json& syn = cal.at("synthetic");
            require(syn.at("n_fluct").get<double>() > 0.0, "/calibrate/synthetic/n_fluct",
                    "N must be positive");
            const double c = syn.at("c").get<double>();
            require(c >= 0.0 && c < 1.0, "/calibrate/synthetic/c", "c must lie in [0, 1)");
            require(syn.at("k").get<int>() >= 2, "/calibrate/synthetic/k",
                    "at least two return series required");
            require(syn.at("m").get<int>() > syn.at("k").get<int>(), "/calibrate/synthetic/m",
                    "need more observations than series");
            mc_draws = syn.at("k").get<double>() * syn.at("m").get<double>();
        } else {
            const std::filesystem::path p = cal.at("input_csv").get<std::string>();
            require(std::filesystem::exists(p), "/calibrate/input_csv",
                    "file not found: " + p.string());
        }
        node_evals = 60.0 * 5000.0;
    } else if (mode == "mc-validate") {
        const auto target = s.resolved.at("validate").at("target").get<std::string>();
        require(target == "subordinated" || target == "nosub" || target == "nosub-multimarket",
                "/validate/target", "expected 'subordinated', 'nosub' or 'nosub-multimarket'");
        require(s.resolved.at("validate").at("density_floor").get<double>() > 0.0,
                "/validate/density_floor", "density floor must be positive");
        if (target == "nosub") {
            check_k(s, 2);
            overlap_check();
        }
        if (target == "nosub-multimarket") {
            check_markets(s, 1, false);
            if (s.markets().beta() > quadrature::kMaxTensorFactors)
                notes.push_back("beta > 4: analytic side unavailable, MC summary only");
            const int creditors = s.resolved.at("portfolio").at("creditors").get<int>();
            require(creditors == 1 || creditors == 2, "/portfolio/creditors", "expected 1 or 2");
        }
        if (mc.sampler == mc::SamplerKind::wishart)
            require(std::floor(market.n_fluct) == market.n_fluct, "/market/n_fluct",
                    "the Wishart sampler needs integer N");
        double total = 0.0;
        if (target == "nosub-multimarket")
            total = s.markets().total_size();
        else
            for (int k : ks) total += k;
        mc_draws = total * mc.n_samples;
        node_evals = ks.size() * quad_nodes(quad, 1) * (1.0 + cells / 50.0);
    }

    // Rough single-core throughput figures of the engines.
    const double seconds = node_evals / 2.0e7 + mc_draws / 5.0e7;
    report["cost"] = {{"quadrature_node_evaluations", node_evals},
                      {"mc_obligor_draws", mc_draws},
                      {"estimated_seconds_single_core", seconds}};
    report["notes"] = notes;
    report["status"] = "ok";
    return report;
}

std::filesystem::path scenario_dir() {
    if (const char* env = std::getenv("JOINTLOSS_SCENARIOS"); env && *env) return env;
    return JOINTLOSS_SCENARIO_DIR;
}

std::filesystem::path find_scenario(const std::string& name_or_path) {
    const std::filesystem::path p(name_or_path);
    if (std::filesystem::exists(p)) return p;
    for (const auto& candidate : {scenario_dir() / name_or_path,
                                  scenario_dir() / (name_or_path + ".json")})
        if (std::filesystem::exists(candidate)) return candidate;
    return p;
}

}  // namespace jointloss::app
