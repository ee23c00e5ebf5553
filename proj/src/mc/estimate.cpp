#include "jointloss/mc/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "jointloss/errors.hpp"
#include "jointloss/mc/samplers.hpp"
#include "jointloss/parallel.hpp"

namespace jointloss::mc {

namespace {

constexpr std::int64_t kChunk = 8192;
constexpr int kBatches = 32;

struct Moments {
    double n = 0, s1 = 0, s2 = 0, q1 = 0, q2 = 0, x12 = 0;

    void add(double a, double b) {
        n += 1;
        s1 += a;
        s2 += b;
        q1 += a * a;
        q2 += b * b;
        x12 += a * b;
    }
    void merge(const Moments& o) {
        n += o.n;
        s1 += o.s1;
        s2 += o.s2;
        q1 += o.q1;
        q2 += o.q2;
        x12 += o.x12;
    }
    double correlation() const {
        const double v1 = q1 / n - (s1 / n) * (s1 / n);
        const double v2 = q2 / n - (s2 / n) * (s2 / n);
        const double c = x12 / n - (s1 / n) * (s2 / n);
        return c / std::sqrt(v1 * v2);
    }
};

// Floating-point sums are kept per chunk and merged in chunk order.
struct ChunkResult {
    Moments moments;
    Moments pair_moments;  // antithetic pair averages
    std::vector<std::array<double, 2>> samples;
};

// Integer counts are merged per worker; integer addition is order-free.
struct Counts {
    std::int64_t no_default = 0;
    std::array<std::int64_t, 2> zero{};
    std::vector<std::int64_t> tails;
    std::vector<std::int64_t> atoms;
    std::int64_t ordering = 0;
    std::int64_t obligor_ordering = 0;
    std::vector<std::int64_t> hist_all, hist_cont;

    Counts(const McConfig& cfg, const LossStructure& st) {
        tails.assign(cfg.tail_thresholds.size() * 2, 0);
        if (st.kind == LossStructure::Kind::subordinated) atoms.assign(st.junior_atoms + 1, 0);
        hist_all.assign(static_cast<std::size_t>(cfg.histogram_bins) * cfg.histogram_bins, 0);
        hist_cont.assign(hist_all.size(), 0);
    }
    void merge(const Counts& o) {
        no_default += o.no_default;
        zero[0] += o.zero[0];
        zero[1] += o.zero[1];
        for (std::size_t i = 0; i < tails.size(); ++i) tails[i] += o.tails[i];
        for (std::size_t i = 0; i < atoms.size(); ++i) atoms[i] += o.atoms[i];
        ordering += o.ordering;
        obligor_ordering += o.obligor_ordering;
        for (std::size_t i = 0; i < hist_all.size(); ++i) {
            hist_all[i] += o.hist_all[i];
            hist_cont[i] += o.hist_cont[i];
        }
    }
};

std::unique_ptr<Sampler> make_sampler(const McProblem& p, SamplerKind kind) {
    if (kind == SamplerKind::wishart) return std::make_unique<WishartSampler>(p.markets);
    return std::make_unique<CompoundSampler>(p.markets);
}

int bin_of(double l, int bins) {
    if (l < 0.0 || l > 1.0) return -1;
    return std::min(bins - 1, static_cast<int>(l * bins));
}

ChunkResult run_chunk(const McProblem& p, const McConfig& cfg, std::int64_t chunk,
                      std::int64_t count, Counts& cnt) {
    std::seed_seq seq{static_cast<std::uint64_t>(cfg.rng_seed & 0xffffffffu),
                      static_cast<std::uint64_t>(cfg.rng_seed >> 32),
                      static_cast<std::uint64_t>(chunk)};
    Rng rng(seq);
    auto sampler = make_sampler(p, cfg.sampler);
    const int k = sampler->size();
    const int bins = cfg.histogram_bins;
    const auto& st = p.structure;
    const bool sub = st.kind == LossStructure::Kind::subordinated;

    ChunkResult r;
    if (cfg.keep_samples) r.samples.reserve(count);

    std::vector<double> x(k), xa(k), v(k);
    std::array<double, 2> pair_sum{};
    for (std::int64_t s = 0; s < count; ++s) {
        const bool mirrored = cfg.antithetic && (s % 2 == 1);
        if (mirrored) {
            for (int i = 0; i < k; ++i) xa[i] = -x[i];
            asset_values(p.markets, xa, v);
        } else {
            sampler->draw(rng, x);
            asset_values(p.markets, x, v);
        }
        const PortfolioLoss pl = evaluate_losses(v, st);
        const double l1 = pl.loss[0], l2 = pl.loss[1];
        r.moments.add(l1, l2);
        if (cfg.antithetic) {
            if (!mirrored) {
                pair_sum = {l1, l2};
            } else {
                r.pair_moments.add(0.5 * (pair_sum[0] + l1), 0.5 * (pair_sum[1] + l2));
            }
        }
        if (pl.defaults == 0) ++cnt.no_default;
        const bool zero1 = l1 == 0.0, zero2 = l2 == 0.0;
        if (zero1) ++cnt.zero[0];
        if (zero2) ++cnt.zero[1];
        for (std::size_t t = 0; t < cfg.tail_thresholds.size(); ++t) {
            if (l1 > cfg.tail_thresholds[t]) ++cnt.tails[2 * t];
            if (l2 > cfg.tail_thresholds[t]) ++cnt.tails[2 * t + 1];
        }
        bool on_line = zero1 || (st.creditors == 2 && zero2);
        if (sub) {
            if (l1 > l2) ++cnt.ordering;
            cnt.obligor_ordering += pl.ordering_violations;
            if (pl.junior_band == 0) {
                ++cnt.atoms[pl.defaults];
                on_line = true;
            }
        }
        const int bx = bin_of(l1, bins);
        const int by = st.creditors == 2 ? bin_of(l2, bins) : 0;
        if (bx >= 0 && by >= 0) {
            const std::size_t cell = static_cast<std::size_t>(bx) * bins + by;
            ++cnt.hist_all[cell];
            if (!on_line) ++cnt.hist_cont[cell];
        }
        if (cfg.keep_samples) r.samples.push_back({l1, l2});
    }
    return r;
}

Estimate proportion(std::int64_t hits, std::int64_t n) {
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace

void McConfig::validate() const {
    if (n_samples < 1) throw DomainError("mc: n_samples must be positive");
    if (histogram_bins < 1) throw DomainError("mc: histogram_bins must be positive");
    if (antithetic && n_samples % 2 != 0) throw DomainError("mc: antithetic runs need even n");
}

McRun estimate(const McProblem& problem, const McConfig& config) {
    config.validate();
    problem.markets.validate();
    if (problem.structure.size() != problem.markets.total_size()) {
        throw DomainError("mc: loss structure and markets disagree on K");
    }
    // constructs the sampler once up front so limit violations surface here
    make_sampler(problem, config.sampler);

    const std::int64_t n = config.n_samples;
    const std::int64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkResult> results(chunks);
    const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(chunks)));
    std::vector<Counts> worker_counts(workers, Counts(config, problem.structure));
    const std::int64_t per_worker = (chunks + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            const std::int64_t c0 = w * per_worker;
            const std::int64_t c1 = std::min<std::int64_t>(chunks, c0 + per_worker);
            for (std::int64_t c = c0; c < c1; ++c) {
                const std::int64_t count = std::min<std::int64_t>(kChunk, n - c * kChunk);
                results[c] = run_chunk(problem, config, c, count, worker_counts[w]);
            }
        }
    });
    Counts counts(config, problem.structure);
    for (const auto& wc : worker_counts) counts.merge(wc);

    McRun run;
    run.config = config;
    run.n = n;
    run.creditors = problem.structure.creditors;
    run.hist_axis = {"l", 0.0, 1.0, config.histogram_bins};
    run.histogram_all = std::move(counts.hist_all);
    run.histogram_continuous = std::move(counts.hist_cont);
    run.ordering_violations = counts.ordering;
    run.obligor_ordering_violations = counts.obligor_ordering;

    Moments total, pairs;
    const int batches = static_cast<int>(std::min<std::int64_t>(kBatches, chunks));
    std::vector<Moments> batch(batches);
    for (std::int64_t c = 0; c < chunks; ++c) {
        auto& r = results[c];
        total.merge(r.moments);
        pairs.merge(r.pair_moments);
        batch[c * batches / chunks].merge(r.moments);
        if (config.keep_samples) {
            run.samples.insert(run.samples.end(), r.samples.begin(), r.samples.end());
            r.samples.clear();
            r.samples.shrink_to_fit();
        }
    }

    const double nn = static_cast<double>(n);
    for (int b = 0; b < run.creditors; ++b) {
        auto& cs = run.creditor[b];
        const double s = b == 0 ? total.s1 : total.s2;
        const double q = b == 0 ? total.q1 : total.q2;
        const double mean = s / nn;
        cs.variance = std::max(0.0, (q / nn - mean * mean) * nn / std::max(1.0, nn - 1.0));
        double se = std::sqrt(cs.variance / nn);
        if (config.antithetic && pairs.n > 1) {
            const double ps = b == 0 ? pairs.s1 : pairs.s2;
            const double pq = b == 0 ? pairs.q1 : pairs.q2;
            const double pm = ps / pairs.n;
            se = std::sqrt(std::max(0.0, pq / pairs.n - pm * pm) / (pairs.n - 1.0));
        }
        cs.mean = {mean, se};
        cs.zero_mass = proportion(counts.zero[b], n);
        for (std::size_t t = 0; t < config.tail_thresholds.size(); ++t) {
            cs.tails.push_back(proportion(counts.tails[2 * t + b], n));
        }
    }
    if (run.creditors == 2) {
        const double rho = total.correlation();
        double se = 0.0;
        if (batches > 1) {
            double m = 0.0, m2 = 0.0;
            for (const auto& bm : batch) {
                const double rb = bm.correlation();
                m += rb;
                m2 += rb * rb;
            }
            m /= batches;
            se = std::sqrt(std::max(0.0, m2 / batches - m * m) / (batches - 1));
        }
        run.correlation = {rho, se};
    }
    run.no_default = proportion(counts.no_default, n);
    for (auto a : counts.atoms) run.junior_atoms.push_back(proportion(a, n));
    return run;
}

nlohmann::json McRun::summary() const {
    nlohmann::json j;
    j["n_samples"] = n;
    j["rng_seed"] = config.rng_seed;
    j["sampler"] = config.sampler == SamplerKind::wishart ? "wishart" : "compound";
    j["antithetic"] = config.antithetic;
    auto est = [](const Estimate& e) { return nlohmann::json{{"value", e.value}, {"se", e.se}}; };
    for (int b = 0; b < creditors; ++b) {
        nlohmann::json c;
        c["mean"] = est(creditor[b].mean);
        c["variance"] = creditor[b].variance;
        c["zero_mass"] = est(creditor[b].zero_mass);
        nlohmann::json t = nlohmann::json::array();
        for (std::size_t i = 0; i < creditor[b].tails.size(); ++i) {
            t.push_back({{"threshold", config.tail_thresholds[i]},
                         {"probability", est(creditor[b].tails[i])}});
        }
        c["tails"] = t;
        j["creditors"].push_back(c);
    }
    if (creditors == 2) j["correlation"] = est(correlation);
    j["no_default"] = est(no_default);
    if (!junior_atoms.empty()) {
        double mass = 0.0;
        for (const auto& a : junior_atoms) mass += a.value;
        j["junior_atom_mass"] = mass;
        j["ordering_violations"] = ordering_violations;
        j["obligor_ordering_violations"] = obligor_ordering_violations;
    }
    return j;
}

}  // namespace jointloss::mc
