#include "jointloss/app/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "jointloss/asymptotics/limits.hpp"
#include "jointloss/calibration/fit.hpp"
#include "jointloss/errors.hpp"
#include "jointloss/io/csv.hpp"
#include "jointloss/loss/correlation.hpp"
#include "jointloss/loss/no_default.hpp"
#include "jointloss/loss/nosub.hpp"
#include "jointloss/loss/subordinated.hpp"
#include "jointloss/mc/samplers.hpp"
#include "jointloss/parallel.hpp"

namespace jointloss::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Shortest round-trip text, for one-line summaries.
std::string fmt(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// Writes artifacts into one directory and records them for the manifest.
class ArtifactWriter {
public:
    ArtifactWriter(const Scenario& scenario, fs::path dir, std::ostream& log)
        : scenario_(scenario), dir_(std::move(dir)), log_(log) {
        fs::create_directories(dir_);
    }

    void grid(const std::string& stem, DensityGrid g, const std::string& summary) {
        stamp(g.metadata);
        write_text(stem + ".csv", [&](std::ostream& out) { write_csv(g, out); });
        write_text(stem + ".json", [&](std::ostream& out) { out << to_json(g).dump(1) << '\n'; });
        record(stem + ".csv", "grid", summary);
    }

    void curve(const std::string& stem, Curve c, const std::string& summary) {
        stamp(c.metadata);
        write_text(stem + ".csv", [&](std::ostream& out) { write_csv(c, out); });
        write_text(stem + ".json", [&](std::ostream& out) { out << to_json(c).dump(1) << '\n'; });
        record(stem + ".csv", "curve", summary);
    }

    void table(const std::string& stem, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, json metadata,
               const std::string& summary) {
        stamp(metadata);
        write_text(stem + ".csv", [&](std::ostream& out) {
            io::CsvWriter w(out, header);
            for (const auto& r : rows) w.row(r);
        });
        json env{{"schema_version", kSchemaVersion},
                 {"kind", "table"},
                 {"columns", header},
                 {"rows", rows},
                 {"metadata", metadata}};
        write_text(stem + ".json", [&](std::ostream& out) { out << env.dump(1) << '\n'; });
        record(stem + ".csv", "table", summary);
    }

    void report(const std::string& stem, json body, const std::string& summary) {
        json env{{"schema_version", kSchemaVersion}, {"kind", "report"}, {"report", body}};
        env["metadata"] = json::object();
        stamp(env["metadata"]);
        write_text(stem + ".json", [&](std::ostream& out) { out << env.dump(1) << '\n'; });
        record(stem + ".json", "report", summary);
    }

    RunResult finish(const std::string& status, const json& error = nullptr) {
        RunResult r;
        r.out_dir = dir_;
        r.artifacts = records_;
        json artifacts = json::array();
        for (const auto& a : records_)
            artifacts.push_back({{"path", a.path}, {"kind", a.kind}, {"summary", a.summary}});
        r.manifest = {{"schema_version", kSchemaVersion},
                      {"kind", "manifest"},
                      {"status", status},
                      {"scenario_fingerprint", scenario_.fingerprint},
                      {"scenario", scenario_.resolved},
                      {"artifacts", artifacts}};
        if (!error.is_null()) r.manifest["error"] = error;
        write_text("manifest.json",
                   [&](std::ostream& out) { out << r.manifest.dump(1) << '\n'; });
        return r;
    }

private:
    void stamp(json& metadata) const {
        metadata["scenario_fingerprint"] = scenario_.fingerprint;
        metadata["schema_version"] = kSchemaVersion;
        metadata["mode"] = scenario_.mode();
    }

    template <class F>
    void write_text(const std::string& name, F&& body) {
        // Binary mode keeps Unix newlines on every platform.
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        body(out);
        if (!out) throw std::runtime_error("write failed: " + (dir_ / name).string());
    }

    void record(const std::string& path, const std::string& kind, const std::string& summary) {
        records_.push_back({path, kind, summary});
        log_ << (dir_ / path).string() << "  " << summary << '\n';
    }

    const Scenario& scenario_;
    fs::path dir_;
    std::ostream& log_;
    std::vector<ArtifactRecord> records_;
};

struct GridStats {
    double mass = 0.0;
    double peak = 0.0;
    double diagonal_fraction = 0.0;  // mass within one cell of the diagonal
};

GridStats grid_stats(const DensityGrid& g) {
    GridStats s;
    const double area = g.x.width() * g.y.width();
    double diag = 0.0;
    for (int i = 0; i < g.x.cells; ++i)
        for (int j = 0; j < g.y.cells; ++j) {
            const double v = g.at(i, j);
            s.mass += v * area;
            s.peak = std::max(s.peak, v);
            if (std::abs(i - j) <= 1) diag += v * area;
        }
    s.diagonal_fraction = s.mass > 0.0 ? diag / s.mass : 0.0;
    return s;
}

std::string grid_summary(const DensityGrid& g) {
    const GridStats s = grid_stats(g);
    return "mass=" + fmt(s.mass) + " peak=" + fmt(s.peak) +
           " diagonal_fraction=" + fmt(s.diagonal_fraction);
}

double f0_of(const Scenario& s) { return s.resolved.at("portfolio").at("f0").get<double>(); }

// Fills a grid pointwise in parallel; flags are returned through `quality`.
template <class F>
DensityGrid fill_grid(const Axis& ax, const Axis& ay, F&& point) {
    DensityGrid grid(ax, ay);
    parallel_for(grid.values.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const int i = static_cast<int>(k / ay.cells), j = static_cast<int>(k % ay.cells);
            grid.values[k] = point(ax.center(i), ay.center(j));
        }
    });
    return grid;
}

void run_subordinated(const Scenario& s, ArtifactWriter& w) {
    const auto quad = s.quadrature();
    for (int k : s.k_values()) {
        const SubordinatedScenario sc{k, s.subordination(), s.market()};
        DensityGrid g = grid_subordinated(sc, quad, s.axis("l_senior"), s.axis("l_junior"));
        g.metadata["k_obligors"] = k;
        w.grid("subordinated_K" + std::to_string(k), g, grid_summary(g));
    }
}

void run_nosub(const Scenario& s, ArtifactWriter& w) {
    const auto quad = s.quadrature();
    for (int k : s.k_values()) {
        const auto sc = NoSubScenario::overlap(s.overlap(), k, s.market());
        DensityGrid g = grid_nosub(sc, quad, s.axis("l1"), s.axis("l2"));
        g.metadata["k_obligors"] = k;
        g.metadata["diagonal_fraction"] = grid_stats(g).diagonal_fraction;
        w.grid("nosub_K" + std::to_string(k), g, grid_summary(g));
    }
}

NoSubScenario multimarket_scenario(const Scenario& s) {
    const auto mm = s.markets();
    const int creditors = s.resolved.at("portfolio").at("creditors").get<int>();
    return creditors == 1 ? NoSubScenario::single_creditor(mm, f0_of(s))
                          : NoSubScenario::creditor_per_market(mm, f0_of(s));
}

void run_nosub_multimarket(const Scenario& s, ArtifactWriter& w) {
    const auto quad = s.quadrature();
    const auto sc = multimarket_scenario(s);
    const std::string stem = "nosub_multimarket_beta" + std::to_string(sc.markets.beta());
    const auto thresholds = s.mc().tail_thresholds;
    if (sc.creditors == 1) {
        const Mixture1 mix = nosub_marginal_mixture(0, sc, quad);
        Curve c;
        const Axis ax = s.axis("l");
        for (int i = 0; i < ax.cells; ++i) {
            c.x.push_back(ax.center(i));
            c.y.push_back(mix.density(ax.center(i)));
        }
        json tails = json::array();
        std::string summary;
        for (double t : thresholds) {
            const double p = mix.tail(t);
            tails.push_back({{"threshold", t}, {"probability", p}});
            summary += " P(L>" + fmt(t) + ")=" + fmt(p);
        }
        c.metadata["tails"] = tails;
        c.metadata["beta"] = sc.markets.beta();
        c.metadata["k_obligors"] = sc.k_obligors();
        c.metadata["skipped_node_weight"] = mix.skipped_weight();
        w.curve(stem, c, "beta=" + std::to_string(sc.markets.beta()) + summary);
    } else {
        DensityGrid g = grid_nosub(sc, quad, s.axis("l1"), s.axis("l2"));
        g.metadata["beta"] = sc.markets.beta();
        w.grid(stem, g, grid_summary(g));
    }
}

void run_limit_subordinated(const Scenario& s, ArtifactWriter& w) {
    DensityGrid g = grid_limit_subordinated(s.subordination(), s.market(), s.axis("l_senior"),
                                            s.axis("l_junior"));
    int flagged = 0;
    for (int q : g.quality) flagged += q != 0;
    w.grid("limit_subordinated", g, grid_summary(g) + " flagged_points=" + std::to_string(flagged));
}

void run_limit_equal(const Scenario& s, ArtifactWriter& w) {
    const Axis ax = s.axis("l");
    const double f0 = f0_of(s);
    const MarketParams p = s.market();
    Curve c;
    c.x.resize(ax.cells);
    c.y.resize(ax.cells);
    parallel_for(ax.cells, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            c.x[i] = ax.center(static_cast<int>(i));
            c.y[i] = density_limit_equal_infinite(c.x[i], f0, p);
        }
    });
    double mass = 0.0;
    for (double v : c.y) mass += v * ax.width();
    c.metadata["support"] = "line l1 = l2";
    w.curve("limit_equal", c, "mass=" + fmt(mass));
}

void run_limit_finite_vs_infinite(const Scenario& s, ArtifactWriter& w) {
    const int r1 = s.resolved.at("portfolio").at("r1_obligors").get<int>();
    const double f0 = f0_of(s);
    const MarketParams p = s.market();
    DensityGrid g = fill_grid(s.axis("l1"), s.axis("l2"), [&](double l1, double l2) {
        return density_limit_finite_vs_infinite(l1, l2, r1, f0, p);
    });
    g.metadata["r1_obligors"] = r1;
    w.grid("limit_finite_vs_infinite_R" + std::to_string(r1), g, grid_summary(g));
}

void run_limit_two_markets(const Scenario& s, ArtifactWriter& w) {
    const auto mm = s.markets();
    const double f0 = f0_of(s);
    const MarketParams p1 = mm.blocks[0].params, p2 = mm.blocks[1].params;
    DensityGrid g = fill_grid(s.axis("l1"), s.axis("l2"), [&](double l1, double l2) {
        return density_limit_two_markets(l1, l2, f0, p1, f0, p2);
    });
    w.grid("limit_two_markets", g, grid_summary(g));
}

void run_no_default(const Scenario& s, ArtifactWriter& w) {
    const auto quad = s.quadrature();
    const double f0 = f0_of(s);
    auto mus = s.resolved.at("sweep").at("mu_values").get<std::vector<double>>();
    if (mus.empty()) mus.push_back(s.market().mu);
    const bool with_mc = s.resolved.at("sweep").at("compare_mc").get<bool>();
    const auto cfg = s.mc();
    std::vector<std::vector<double>> rows;
    double max_z = 0.0;
    for (double mu : mus) {
        MarketParams p = s.market();
        p.mu = mu;
        for (int k : s.k_values()) {
            const double pnd = no_default_probability(k, f0, p, quad);
            std::vector<double> row{mu, static_cast<double>(k), pnd};
            if (with_mc) {
                const auto mm = MultiMarketParams::single(p, k);
                const auto sc = NoSubScenario::single_creditor(mm, f0);
                const auto run = mc::estimate({mm, mc::LossStructure::nosub(sc)}, cfg);
                const double se = run.no_default.se > 0.0
                                      ? run.no_default.se
                                      : std::sqrt(pnd * (1.0 - pnd) / run.n);
                const double z = std::abs(run.no_default.value - pnd) / se;
                max_z = std::max(max_z, z);
                row.insert(row.end(), {run.no_default.value, run.no_default.se, z});
            }
            rows.push_back(row);
        }
    }
    std::vector<std::string> header{"mu", "k", "p_no_default"};
    if (with_mc) header.insert(header.end(), {"p_no_default_mc", "se_mc", "z"});
    std::string summary = "points=" + std::to_string(rows.size());
    if (with_mc) summary += " max_z=" + fmt(max_z);
    w.table("no_default", header, rows, {{"face", f0}}, summary);
}

void run_correlation_sweep(const Scenario& s, ArtifactWriter& w) {
    const auto quad = s.quadrature();
    const auto cs = s.resolved.at("sweep").at("c_values").get<std::vector<double>>();
    const bool mc_route = s.resolved.at("sweep").at("method").get<std::string>() == "monte-carlo";
    const auto cfg = s.mc();
    std::vector<std::vector<double>> rows;
    for (int k : s.k_values()) {
        for (double c : cs) {
            MarketParams p = s.market();
            p.c = c;
            const auto sc = NoSubScenario::overlap(s.overlap(), k, p);
            const double moments = correlation_from_moments(sc, quad);
            CorrelationResult r{moments, 0.0, CorrelationMethod::moments};
            if (mc_route) r = loss_correlation(sc, CorrelationMethod::monte_carlo, quad, cfg);
            rows.push_back({c, static_cast<double>(k), r.value, r.se, moments});
        }
    }
    std::string summary = "points=" + std::to_string(rows.size());
    for (const auto& r : rows)
        if (r[0] == 0.0) summary += " corr(c=0,K=" + fmt(r[1]) + ")=" + fmt(r[2]);
    w.table("correlation_sweep", {"c", "k", "correlation", "se", "correlation_moments"}, rows,
            {{"method", mc_route ? "monte-carlo" : "moments"}}, summary);
}

ReturnSample calibration_sample(const Scenario& s, json& source) {
    const json& cal = s.resolved.at("calibrate");
    const auto path = cal.at("input_csv").get<std::string>();
    ReturnSample sample;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw DomainError("calibrate: cannot read " + path);
        const auto rows = io::read_numeric_csv(in);
        if (rows.empty() || rows.front().empty()) throw DomainError("calibrate: empty input");
        sample.returns.resize(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size())
                throw DomainError("calibrate: ragged row " + std::to_string(i));
            for (std::size_t j = 0; j < rows[i].size(); ++j)
                sample.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    rows[i][j];
        }
        source = {{"input_csv", path}};
        return sample;
    }
    const json& syn = cal.at("synthetic");
    MarketParams p = s.market();
    p.n_fluct = syn.at("n_fluct").get<double>();
    p.c = syn.at("c").get<double>();
    const int k = syn.at("k").get<int>(), m = syn.at("m").get<int>();
    const auto v = mc::sample_compound(MultiMarketParams::single(p, k), m,
                                       syn.at("seed").get<std::uint64_t>());
    sample.returns = (v.array() / p.v0).log().matrix();
    source = {{"synthetic", syn}};
    return sample;
}

void run_calibrate(const Scenario& s, ArtifactWriter& w) {
    json source;
    const ReturnSample sample = calibration_sample(s, source);
    const FitResult fit = fit_n(sample);
    const double c_hat = effective_correlation(sample.covariance());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < fit.grid_n.size(); ++i) rows.push_back({fit.grid_n[i], fit.profile[i]});
    w.table("calibration_profile", {"n", "log_likelihood"}, rows, {{"source", source}},
            "grid_points=" + std::to_string(rows.size()));
    json body = fit.to_json();
    body["c_hat"] = c_hat;
    body["observations"] = sample.m();
    body["series"] = sample.k();
    body["source"] = source;
    w.report("calibration", body,
             "n_hat=" + fmt(fit.n_hat) + " c_hat=" + fmt(c_hat) +
                 (fit.boundary ? " boundary_maximum" : ""));
}

void run_mc_validate(const Scenario& s, ArtifactWriter& w) {
    const McComparison cmp = compare_with_mc(s);
    json body{{"target", s.resolved.at("validate").at("target")},
              {"analytic_available", cmp.analytic_available},
              {"agreement", cmp.report.to_json()},
              {"agreement_all_cells", cmp.report_all.to_json()},
              {"mc", cmp.run.summary()}};
    w.report("agreement", body,
             "compared=" + std::to_string(cmp.report.compared) +
                 " within=" + std::to_string(cmp.report.within) +
                 " max_z=" + fmt(cmp.report.max_z) +
                 " ordering_violations=" + std::to_string(cmp.run.ordering_violations));

    if (!cmp.analytic_available) return;
    const Axis& ax = cmp.axis;
    const double area = cmp.dims == 2 ? ax.width() * ax.width() : ax.width();
    const auto n = static_cast<double>(cmp.run.n);
    std::vector<std::vector<double>> rows;
    for (std::size_t cell = 0; cell < cmp.analytic_mass.size(); ++cell) {
        const int i = cmp.dims == 2 ? static_cast<int>(cell) / ax.cells : static_cast<int>(cell);
        const int j = cmp.dims == 2 ? static_cast<int>(cell) % ax.cells : 0;
        const double a = cmp.analytic_mass[cell];
        const double o = static_cast<double>(cmp.run.histogram_all[cell]) / n;
        const double pm = std::max(a, o);
        const double se = std::sqrt(pm * (1.0 - pm) / n);
        rows.push_back({ax.center(i), cmp.dims == 2 ? ax.center(j) : 0.0, a / area, o / area,
                        se > 0.0 ? (o - a) / se : 0.0, cmp.off_lines[cell] ? 1.0 : 0.0});
    }
    w.table("agreement_cells", {"x", "y", "analytic_density", "mc_density", "z", "off_lines"},
            rows, {{"bins", ax.cells}}, "cells=" + std::to_string(rows.size()));
}

}  // namespace

fs::path default_output_dir(const Scenario& scenario) {
    const auto dir = scenario.resolved.at("output").at("dir").get<std::string>();
    return dir.empty() ? fs::path("out") / scenario.name() : fs::path(dir);
}

McComparison compare_with_mc(const Scenario& s) {
    const auto target = s.resolved.at("validate").at("target").get<std::string>();
    const double floor = s.resolved.at("validate").at("density_floor").get<double>();
    const double z_limit = s.resolved.at("validate").at("z_limit").get<double>();
    const auto quad = s.quadrature();
    const auto cfg = s.mc();

    McComparison out;
    mc::McProblem problem;
    Mixture2 mix2;
    Mixture1 mix1;
    bool sub = false;
    if (target == "subordinated") {
        const int k = s.k_values().front();
        const SubordinatedScenario sc{k, s.subordination(), s.market()};
        sc.validate();
        problem = {MultiMarketParams::single(sc.params, k),
                   mc::LossStructure::subordinated(sc.spec, k)};
        mix2 = subordinated_mixture(sc, quad);
        sub = true;
    } else {
        const NoSubScenario sc = target == "nosub"
                                     ? NoSubScenario::overlap(s.overlap(), s.k_values().front(),
                                                              s.market())
                                     : multimarket_scenario(s);
        problem = {sc.markets, mc::LossStructure::nosub(sc)};
        out.dims = sc.creditors;
        out.analytic_available = sc.markets.beta() <= quadrature::kMaxTensorFactors;
        if (out.analytic_available) {
            if (sc.creditors == 2)
                mix2 = nosub_mixture(sc, quad);
            else
                mix1 = nosub_marginal_mixture(0, sc, quad);
        }
    }

    out.run = mc::estimate(problem, cfg);
    out.axis = out.run.hist_axis;
    const Axis& ax = out.axis;
    const std::size_t cells =
        out.dims == 2 ? static_cast<std::size_t>(ax.cells) * ax.cells : ax.cells;
    // The single-creditor histogram uses the first column of the 2-D layout.
    std::vector<std::int64_t> counts(cells);
    for (std::size_t c = 0; c < cells; ++c)
        counts[c] = out.dims == 2 ? out.run.histogram_all[c]
                                  : out.run.histogram_all[c * ax.cells];
    out.run.histogram_all = counts;

    out.off_lines.assign(cells, true);
    for (std::size_t c = 0; c < cells; ++c) {
        const int i = out.dims == 2 ? static_cast<int>(c) / ax.cells : static_cast<int>(c);
        const int j = out.dims == 2 ? static_cast<int>(c) % ax.cells : -1;
        // Delta lines: L1 = 0 and L2 = 0 without subordination; L^S = 0 (which
        // holds every junior atom) with it.
        if (i == 0 || (!sub && j == 0)) out.off_lines[c] = false;
    }

    const double area = out.dims == 2 ? ax.width() * ax.width() : ax.width();
    if (!out.analytic_available) {
        out.report.n_samples = out.report_all.n_samples = out.run.n;
        out.report.density_floor = out.report_all.density_floor = floor;
        return out;
    }
    if (out.dims == 2) {
        out.analytic_mass = mix2.cell_masses(ax, ax);
    } else {
        out.analytic_mass.resize(cells);
        for (int i = 0; i < ax.cells; ++i)
            out.analytic_mass[i] = mix1.interval(ax.edge(i), ax.edge(i + 1));
    }
    std::unique_ptr<bool[]> mask(new bool[cells]);
    for (std::size_t c = 0; c < cells; ++c) mask[c] = out.off_lines[c];
    out.report = mc::compare_cells(out.analytic_mass, counts, out.run.n, area, floor, z_limit,
                                   std::span<const bool>(mask.get(), cells));
    out.report_all =
        mc::compare_cells(out.analytic_mass, counts, out.run.n, area, floor, z_limit);
    return out;
}

RunResult run_scenario(const Scenario& s, const fs::path& out_dir, std::ostream& log) {
    ArtifactWriter w(s, out_dir, log);
    const std::string& mode = s.mode();
    try {
        if (mode == "subordinated") run_subordinated(s, w);
        else if (mode == "nosub") run_nosub(s, w);
        else if (mode == "nosub-multimarket") run_nosub_multimarket(s, w);
        else if (mode == "limit-subordinated") run_limit_subordinated(s, w);
        else if (mode == "limit-equal") run_limit_equal(s, w);
        else if (mode == "limit-finite-vs-infinite") run_limit_finite_vs_infinite(s, w);
        else if (mode == "limit-two-markets") run_limit_two_markets(s, w);
        else if (mode == "no-default") run_no_default(s, w);
        else if (mode == "correlation-sweep") run_correlation_sweep(s, w);
        else if (mode == "calibrate") run_calibrate(s, w);
        else if (mode == "mc-validate") run_mc_validate(s, w);
        else throw ScenarioError("/mode", "unknown mode '" + mode + "'");
    } catch (const ConvergenceError& e) {
        auto partial = w.finish("partial", {{"kind", "convergence"},
                                            {"message", e.what()},
                                            {"best_estimate", e.best_estimate()},
                                            {"error_bound", e.error_bound()}});
        throw PartialRunError(e.what(), "convergence", std::move(partial));
    } catch (const InconclusiveFitError& e) {
        auto partial = w.finish("partial", {{"kind", "inconclusive_fit"}, {"message", e.what()}});
        throw PartialRunError(e.what(), "inconclusive_fit", std::move(partial));
    }
    return w.finish("complete");
}

}  // namespace jointloss::app
