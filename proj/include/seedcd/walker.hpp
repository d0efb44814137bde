#ifndef SEEDCD_WALKER_HPP
#define SEEDCD_WALKER_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedcd/error.hpp"
#include "seedcd/markov.hpp"
#include "seedcd/parallel.hpp"
#include "seedcd/rng.hpp"
#include "seedcd/seed_set.hpp"

namespace seedcd {

/// Absorption tallies of simulated walks from one start node. `counts` is
/// indexed by the chain's absorbing index.
struct WalkStats {
    NodeId start = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t walks = 0;

    bool operator==(const WalkStats&) const = default;
};

inline constexpr std::uint64_t default_step_cap = 10'000'000;

/**
 * Simulates `walks` random walks from transient node `start` until each is
 * absorbed. Walk k draws from its own stream derived from (rng_seed, start, k),
 * so the result is independent of `jobs`. A walk that exceeds `step_cap`
 * steps throws: on a valid chain absorption happens with probability one.
 */
inline WalkStats run_walks(const AbsorbingChain& chain, NodeId start, std::uint64_t walks, std::uint64_t rng_seed,
                           std::uint64_t step_cap = default_step_cap, std::size_t jobs = 1) {
    if (chain.transient_index(start) == AbsorbingChain::npos) {
        throw std::invalid_argument("start node " + std::to_string(start) + " is not transient");
    }
    if (walks == 0) {
        throw std::invalid_argument("walk count must be at least 1");
    }
    const Graph& g = chain.graph();
    const std::size_t sigma = chain.num_absorbing();

    constexpr std::uint64_t block = 4096;
    const std::uint64_t blocks = (walks + block - 1) / block;
    std::vector<std::vector<std::uint64_t>> partial(blocks, std::vector<std::uint64_t>(sigma, 0));

    parallel_for(blocks, jobs, [&](std::size_t b) {
        auto& counts = partial[b];
        const std::uint64_t end = std::min<std::uint64_t>(walks, (b + 1) * block);
        for (std::uint64_t k = b * block; k < end; ++k) {
            Rng rng(derive_seed(rng_seed, {start, k}));
            NodeId v = start;
            std::uint64_t steps = 0;
            while (!chain.is_seed(v)) {
                if (++steps > step_cap) {
                    throw SolverError("walk from node " + std::to_string(start) + " exceeded " +
                                      std::to_string(step_cap) + " steps");
                }
                auto nb = g.neighbors(v);
                v = nb[rng.below(nb.size())];
            }
            ++counts[chain.absorbing_index(v)];
        }
    });

    WalkStats stats;
    stats.start = start;
    stats.walks = walks;
    stats.counts.assign(sigma, 0);
    for (const auto& counts : partial) {
        for (std::size_t j = 0; j < sigma; ++j) {
            stats.counts[j] += counts[j];
        }
    }
    return stats;
}

/// Plug-in estimate of beta_community(start): sum over seeds of beta(s) * counts[s] / walks.
inline double estimate_affinity(const WalkStats& stats, const AbsorbingChain& chain, const SeedSet& seeds,
                                std::size_t community) {
    if (stats.walks == 0) {
        throw std::invalid_argument("no walks recorded");
    }
    const auto seed_nodes = chain.seed_nodes();
    double acc = 0.0;
    for (std::size_t j = 0; j < seed_nodes.size(); ++j) {
        if (stats.counts[j] != 0) {
            acc += seeds.affinity(seed_nodes[j]).at(community) * static_cast<double>(stats.counts[j]);
        }
    }
    return acc / static_cast<double>(stats.walks);
}

}

#endif
