#ifndef SEEDCD_EVAL_HPP
#define SEEDCD_EVAL_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedcd/detect.hpp"
#include "seedcd/lfr.hpp"
#include "seedcd/parallel.hpp"
#include "seedcd/rng.hpp"

namespace seedcd {

/// Fraction of nodes whose predicted community equals the true one.
inline double quality(std::span<const std::size_t> truth, std::span<const std::size_t> predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("membership maps cover different node sets");
    }
    if (truth.empty()) {
        throw std::invalid_argument("membership maps are empty");
    }
    std::size_t hits = 0;
    for (std::size_t v = 0; v < truth.size(); ++v) {
        hits += truth[v] == predicted[v];
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

template <typename Key>
double quality(const std::map<Key, std::size_t>& truth, const std::map<Key, std::size_t>& predicted) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("membership maps cover different node sets");
    }
    if (truth.empty()) {
        throw std::invalid_argument("membership maps are empty");
    }
    std::size_t hits = 0;
    for (const auto& [key, community] : truth) {
        auto it = predicted.find(key);
        if (it == predicted.end()) {
            throw std::invalid_argument("membership maps cover different node sets");
        }
        hits += it->second == community;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

struct PredictionStats {
    std::size_t unreachable = 0;  // nodes with no path to a seed; counted as misassigned
};

/**
 * Crisp prediction for every node of `g`. Nodes that cannot reach any seed
 * are left `unassigned` and the rest are detected on the induced subgraph,
 * so a disconnected benchmark graph still yields a full prediction.
 */
inline std::vector<std::size_t> predict(const Graph& g, const SeedSet& seeds, const DetectOptions& opts,
                                        PredictionStats* stats = nullptr) {
    const auto ids = seeds.nodes();
    const auto unreachable = check_seed_reachability(g, ids);
    if (stats) {
        stats->unreachable = unreachable.size();
    }
    if (unreachable.empty()) {
        return crisp_membership(detect_multi(g, seeds, opts), seeds, g.num_nodes());
    }

    std::vector<char> keep(g.num_nodes(), 1);
    for (NodeId v : unreachable) {
        keep[v] = 0;
    }
    std::vector<NodeId> old_ids;
    Graph sub = induced_subgraph(g, keep, old_ids);
    std::vector<NodeId> new_id(g.num_nodes(), 0);
    for (NodeId i = 0; i < old_ids.size(); ++i) {
        new_id[old_ids[i]] = i;
    }
    SeedSet sub_seeds(seeds.communities());
    for (const auto& [node, row] : seeds.rows()) {
        sub_seeds.set(new_id[node], row);
    }
    auto sub_membership = crisp_membership(detect_multi(sub, sub_seeds, opts), sub_seeds, sub.num_nodes());
    std::vector<std::size_t> out(g.num_nodes(), unassigned);
    for (NodeId i = 0; i < old_ids.size(); ++i) {
        out[old_ids[i]] = sub_membership[i];
    }
    return out;
}

struct SweepCell {
    LfrParams params;
    double sigma = 0.1;
};

struct TrialResult {
    std::size_t cell = 0;
    std::size_t trial = 0;
    std::uint64_t rng_seed = 0;
    bool ok = false;
    double q = 0.0;
    double seconds = 0.0;
    std::size_t communities = 0;
    std::size_t unseeded = 0;     // communities that received no seed
    std::size_t unreachable = 0;  // nodes without a path to any seed
    std::string error;
};

struct CellSummary {
    SweepCell cell;
    std::size_t completed = 0;
    std::size_t failed = 0;
    double q_mean = 0.0;
    double q_std = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    double seconds_mean = 0.0;
};

struct SweepResult {
    std::vector<TrialResult> trials;
    std::vector<CellSummary> cells;
};

/**
 * One benchmark trial: generate a planted graph, sample seeds, detect,
 * score. The graph depends on (rng_seed, trial) only, so cells that differ
 * in sigma alone see the same graphs; seed sampling also depends on the cell.
 */
inline TrialResult run_trial(const SweepCell& cell, std::size_t cell_index, std::size_t trial, std::uint64_t rng_seed,
                             const DetectOptions& opts = {}) {
    TrialResult r;
    r.cell = cell_index;
    r.trial = trial;
    r.rng_seed = rng_seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        LfrParams params = cell.params;
        params.rng_seed = derive_seed(rng_seed, {trial});
        const PlantedGraph pg = generate(params);
        Rng rng(derive_seed(rng_seed, {trial, cell_index, 1}));
        const SeedSample sample = sample_seeds(pg, cell.sigma, rng);
        PredictionStats stats;
        const auto predicted = predict(pg.graph, sample.seeds, opts, &stats);
        r.q = quality(pg.membership, predicted);
        r.communities = pg.communities();
        r.unseeded = sample.unseeded.size();
        r.unreachable = stats.unreachable;
        r.ok = true;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline CellSummary summarize(const SweepCell& cell, std::span<const TrialResult> trials) {
    CellSummary s;
    s.cell = cell;
    double sum = 0.0, seconds = 0.0;
    s.q_min = std::numeric_limits<double>::infinity();
    s.q_max = -std::numeric_limits<double>::infinity();
    for (const auto& t : trials) {
        if (!t.ok) {
            ++s.failed;
            continue;
        }
        ++s.completed;
        sum += t.q;
        seconds += t.seconds;
        s.q_min = std::min(s.q_min, t.q);
        s.q_max = std::max(s.q_max, t.q);
    }
    if (s.completed == 0) {
        s.q_min = s.q_max = std::numeric_limits<double>::quiet_NaN();
        s.q_mean = s.q_std = s.seconds_mean = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    const auto k = static_cast<double>(s.completed);
    s.q_mean = sum / k;
    s.seconds_mean = seconds / k;
    double ss = 0.0;
    for (const auto& t : trials) {
        if (t.ok) {
            ss += (t.q - s.q_mean) * (t.q - s.q_mean);
        }
    }
    s.q_std = s.completed > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    return s;
}

/// Runs `trials` independent trials per cell on up to `jobs` threads.
/// Results do not depend on `jobs`. Infeasible trials are recorded, not thrown.
inline SweepResult run_sweep(std::span<const SweepCell> grid, std::size_t trials, std::uint64_t rng_seed,
                             std::size_t jobs = 1, const DetectOptions& opts = {}) {
    if (trials == 0) {
        throw std::invalid_argument("trials must be at least 1");
    }
    SweepResult out;
    out.trials.resize(grid.size() * trials);
    parallel_for(out.trials.size(), jobs, [&](std::size_t job) {
        const std::size_t cell = job / trials, trial = job % trials;
        out.trials[job] = run_trial(grid[cell], cell, trial, rng_seed, opts);
    });
    for (std::size_t c = 0; c < grid.size(); ++c) {
        out.cells.push_back(summarize(grid[c], std::span<const TrialResult>(out.trials).subspan(c * trials, trials)));
    }
    return out;
}

/**
 * Quality over `runs` independent seed draws on one fixed graph, as used
 * for the spread-of-Q histogram. Run i draws its seeds from (rng_seed, i).
 */
inline std::vector<double> resample_quality(const Graph& g, std::span<const std::size_t> truth, double sigma,
                                            std::size_t runs, std::uint64_t rng_seed, std::size_t jobs = 1,
                                            const DetectOptions& opts = {}) {
    if (runs == 0) {
        throw std::invalid_argument("runs must be at least 1");
    }
    PlantedGraph pg;
    pg.graph = g;
    pg.membership.assign(truth.begin(), truth.end());
    const std::size_t l = truth.empty() ? 0 : *std::max_element(truth.begin(), truth.end()) + 1;
    pg.community_sizes.assign(l, 0);
    for (std::size_t c : truth) {
        ++pg.community_sizes[c];
    }
    std::vector<double> q(runs);
    parallel_for(runs, jobs, [&](std::size_t i) {
        Rng rng(derive_seed(rng_seed, {i}));
        const SeedSample sample = sample_seeds(pg, sigma, rng);
        q[i] = quality(truth, predict(pg.graph, sample.seeds, opts));
    });
    return q;
}

struct HistogramBin {
    double lo;
    double hi;
    double freq;
};

/// Relative frequencies over `bins` equal-width bins on [0,1]. Bins are
/// half-open [lo, hi) except the last, which includes 1.
inline std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0) {
        throw std::invalid_argument("bins must be at least 1");
    }
    if (values.empty()) {
        throw std::invalid_argument("histogram of no values");
    }
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("histogram value " + std::to_string(v) + " is outside [0,1]");
        }
        ++counts[std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)))];
    }
    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i] = {static_cast<double>(i) / static_cast<double>(bins), static_cast<double>(i + 1) / static_cast<double>(bins),
                  static_cast<double>(counts[i]) / static_cast<double>(values.size())};
    }
    return out;
}

namespace detail {

inline std::string fmt(double v, const char* spec = "%.9g") {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}

/// Results table. seconds_mean is left empty unless `with_timing`, so
/// repeated runs produce identical files.
inline void write_results_csv(std::ostream& out, std::span<const CellSummary> cells, bool with_timing = false) {
    out << "N,avg_k,gamma,beta_exp,mu,sigma,trials,q_mean,q_std,q_min,q_max,seconds_mean\n";
    for (const auto& c : cells) {
        const auto& p = c.cell.params;
        out << p.n << ',' << detail::fmt(p.avg_k, "%g") << ',' << detail::fmt(p.gamma, "%g") << ','
            << detail::fmt(p.beta_exp, "%g") << ',' << detail::fmt(p.mu, "%g") << ',' << detail::fmt(c.cell.sigma, "%g")
            << ',' << c.completed << ',' << detail::fmt(c.q_mean) << ',' << detail::fmt(c.q_std) << ','
            << detail::fmt(c.q_min) << ',' << detail::fmt(c.q_max) << ','
            << (with_timing ? detail::fmt(c.seconds_mean, "%.6f") : std::string()) << '\n';
    }
}

inline void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
    out << "bin_lo,bin_hi,freq\n";
    for (const auto& b : bins) {
        out << detail::fmt(b.lo, "%g") << ',' << detail::fmt(b.hi, "%g") << ',' << detail::fmt(b.freq) << '\n';
    }
}

}

#endif
