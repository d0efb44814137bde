#ifndef SEEDCD_LFR_HPP
#define SEEDCD_LFR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "seedcd/error.hpp"
#include "seedcd/graph.hpp"
#include "seedcd/rng.hpp"
#include "seedcd/seed_set.hpp"

namespace seedcd {

/**
 * Parameters of the planted-partition benchmark. A bound left at 0 is
 * derived from the others by `resolve`: k_max = min(3 avg_k, n / 10),
 * k_min starts at ceil(avg_k / 2) and moves until the analytic mean degree
 * is closest to avg_k, s_min = 10, s_max = n / 5.
 */
struct LfrParams {
    std::size_t n = 500;
    double avg_k = 20.0;
    double gamma = 2.0;     // degree exponent
    double beta_exp = 2.0;  // community-size exponent
    double mu = 0.1;        // mixing: fraction of each node's edges leaving its community
    std::size_t k_min = 0;
    std::size_t k_max = 0;
    std::size_t s_min = 0;
    std::size_t s_max = 0;
    std::uint64_t rng_seed = 1;
};

struct PlantedGraph {
    Graph graph;
    std::vector<std::size_t> membership;       // node -> community
    std::vector<std::size_t> community_sizes;
    LfrParams params;                          // with all bounds resolved
    std::size_t dropped_edges = 0;             // stub pairs discarded after rewiring
    std::size_t attempts = 0;

    std::size_t communities() const { return community_sizes.size(); }
};

/// Mean of the discrete power law p(x) ~ x^-exponent on [lo, hi].
inline double power_law_mean(double exponent, std::size_t lo, std::size_t hi) {
    double num = 0.0, den = 0.0;
    for (std::size_t x = lo; x <= hi; ++x) {
        const double w = std::pow(static_cast<double>(x), -exponent);
        num += w * static_cast<double>(x);
        den += w;
    }
    return num / den;
}

/// I.i.d. draws from the discrete power law p(x) ~ x^-exponent truncated to [lo, hi].
inline std::vector<std::size_t> sample_power_law(double exponent, std::size_t lo, std::size_t hi, std::size_t count,
                                                 Rng& rng) {
    if (!(exponent > 1.0)) {
        throw std::invalid_argument("power-law exponent must exceed 1");
    }
    if (lo < 1 || lo > hi) {
        throw std::invalid_argument("empty power-law support [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    std::vector<double> cdf(hi - lo + 1);
    double acc = 0.0;
    for (std::size_t x = lo; x <= hi; ++x) {
        acc += std::pow(static_cast<double>(x), -exponent);
        cdf[x - lo] = acc;
    }
    std::vector<std::size_t> out(count);
    for (auto& draw : out) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        draw = lo + static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    }
    return out;
}

/// Fills in derived bounds and checks the parameter invariants; throws InfeasibleError.
inline LfrParams resolve(LfrParams p) {
    auto fail = [](const std::string& why) { throw InfeasibleError(why); };
    if (p.n < 2) {
        fail("n must be at least 2");
    }
    if (!(p.mu >= 0.0 && p.mu <= 1.0)) {
        fail("mu must lie in [0, 1]");
    }
    if (!(p.gamma > 1.0) || !(p.beta_exp > 1.0)) {
        fail("power-law exponents must exceed 1");
    }
    if (!(p.avg_k >= 1.0) || p.avg_k >= static_cast<double>(p.n)) {
        fail("avg_k must lie in [1, n)");
    }
    if (p.k_max == 0) {
        p.k_max = std::max<std::size_t>(1, std::min(static_cast<std::size_t>(3.0 * p.avg_k), p.n / 10));
    }
    if (p.k_max >= p.n) {
        fail("k_max = " + std::to_string(p.k_max) + " must be below n = " + std::to_string(p.n));
    }
    if (p.k_min == 0) {
        std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(p.avg_k / 2.0)), 1, p.k_max);
        auto miss = [&](std::size_t lo) { return std::abs(power_law_mean(p.gamma, lo, p.k_max) - p.avg_k); };
        const int step = power_law_mean(p.gamma, k, p.k_max) < p.avg_k ? 1 : -1;
        while (true) {
            const std::size_t next = k + static_cast<std::size_t>(step);
            if (next < 1 || next > p.k_max || miss(next) >= miss(k)) {
                break;
            }
            k = next;
        }
        p.k_min = k;
    }
    if (p.k_min < 1 || p.k_min > p.k_max) {
        fail("need 1 <= k_min <= k_max");
    }
    const double mean = power_law_mean(p.gamma, p.k_min, p.k_max);
    if (std::abs(mean - p.avg_k) > 0.05 * p.avg_k) {
        fail("degree bounds [" + std::to_string(p.k_min) + ", " + std::to_string(p.k_max) +
             "] cannot reach avg_k within 5% (analytic mean " + std::to_string(mean) + ")");
    }
    if (p.s_min == 0) {
        p.s_min = std::min<std::size_t>(10, p.n);
    }
    if (p.s_max == 0) {
        p.s_max = std::max(p.s_min, p.n / 5);
    }
    if (p.s_min < 1 || p.s_min > p.s_max) {
        fail("need 1 <= s_min <= s_max");
    }
    if (p.n < p.s_min) {
        fail("n is smaller than s_min");
    }
    return p;
}

namespace detail {

inline std::size_t internal_degree(std::size_t k, double mu) {
    // The epsilon absorbs products like 0.7 * 20 = 14.000000000000002.
    const double x = (1.0 - mu) * static_cast<double>(k);
    return std::min(k, static_cast<std::size_t>(std::ceil(x - 1e-9)));
}

inline std::uint64_t edge_key(NodeId a, NodeId b) {
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/**
 * Configuration-model matching of one stub list. Pairs that are self-loops,
 * duplicates, or rejected by `allowed` are repaired by random double-edge
 * swaps against already accepted edges; whatever remains after `budget`
 * attempts is dropped. Returns the number of dropped pairs.
 */
template <typename Allowed>
std::size_t match_stubs(std::vector<NodeId>& stubs, Allowed allowed, Rng& rng, std::size_t& budget,
                        std::vector<Edge>& out) {
    shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<Edge> edges;
    std::vector<Edge> bad;
    std::unordered_set<std::uint64_t> present;
    edges.reserve(stubs.size() / 2);
    auto valid = [&](NodeId a, NodeId b) { return a != b && allowed(a, b) && !present.count(edge_key(a, b)); };

    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
        const NodeId a = stubs[i], b = stubs[i + 1];
        if (valid(a, b)) {
            present.insert(edge_key(a, b));
            edges.emplace_back(a, b);
        } else {
            bad.emplace_back(a, b);
        }
    }

    while (!bad.empty() && !edges.empty() && budget > 0) {
        --budget;
        const std::size_t pick = rng.below(bad.size());
        auto [a, b] = bad[pick];
        const std::size_t e = rng.below(edges.size());
        auto [c, d] = edges[e];
        if (rng.below(2)) {
            std::swap(c, d);
        }
        // Replace {a,b} + {c,d} by {a,c} + {b,d}.
        present.erase(edge_key(c, d));
        if (valid(a, c) && valid(b, d) && edge_key(a, c) != edge_key(b, d)) {
            present.insert(edge_key(a, c));
            present.insert(edge_key(b, d));
            edges[e] = {a, c};
            edges.emplace_back(b, d);
            bad[pick] = bad.back();
            bad.pop_back();
        } else {
            present.insert(edge_key(c, d));
        }
    }
    out.insert(out.end(), edges.begin(), edges.end());
    return bad.size();
}

/**
 * Deterministic Havel-Hakimi realization of a degree sequence over `nodes`,
 * then `switches` random degree-preserving double-edge swaps to mix it.
 * Stubs that cannot be realized are dropped and counted.
 */
inline std::size_t havel_hakimi(const std::vector<NodeId>& nodes, const std::vector<std::size_t>& degree, Rng& rng,
                                std::size_t switches, std::vector<Edge>& out) {
    std::vector<std::pair<std::size_t, NodeId>> rest;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        rest.emplace_back(degree[i], nodes[i]);
    }
    std::vector<Edge> edges;
    std::size_t dropped_stubs = 0;
    while (true) {
        std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        while (!rest.empty() && rest.back().first == 0) {
            rest.pop_back();
        }
        if (rest.empty()) {
            break;
        }
        auto [need, v] = rest.front();
        const std::size_t take = std::min(need, rest.size() - 1);
        for (std::size_t j = 1; j <= take; ++j) {
            edges.emplace_back(v, rest[j].second);
            --rest[j].first;
        }
        dropped_stubs += need - take;
        rest.front().first = 0;
    }

    std::unordered_set<std::uint64_t> present;
    for (const auto& [a, b] : edges) {
        present.insert(edge_key(a, b));
    }
    for (std::size_t s = 0; s < switches && edges.size() >= 2; ++s) {
        const std::size_t i = rng.below(edges.size());
        const std::size_t j = rng.below(edges.size());
        auto [a, b] = edges[i];
        auto [c, d] = edges[j];
        if (rng.below(2)) {
            std::swap(c, d);
        }
        if (i == j || a == d || c == b || a == c || b == d || present.count(edge_key(a, d)) ||
            present.count(edge_key(c, b))) {
            continue;
        }
        present.erase(edge_key(a, b));
        present.erase(edge_key(c, d));
        present.insert(edge_key(a, d));
        present.insert(edge_key(c, b));
        edges[i] = {a, d};
        edges[j] = {c, b};
    }
    out.insert(out.end(), edges.begin(), edges.end());
    return (dropped_stubs + 1) / 2;
}

/// Community sizes from the power law, summing to n. Returns false when the
/// remainder cannot be absorbed within the bounds.
inline bool draw_community_sizes(const LfrParams& p, Rng& rng, std::vector<std::size_t>& sizes) {
    sizes.clear();
    std::size_t total = 0;
    while (total < p.n) {
        std::size_t s = sample_power_law(p.beta_exp, p.s_min, p.s_max, 1, rng)[0];
        if (total + s > p.n) {
            s = p.n - total;
        }
        sizes.push_back(s);
        total += s;
    }
    if (sizes.back() >= p.s_min) {
        return true;
    }
    // Spread a short last community over the others.
    std::size_t rest = sizes.back();
    sizes.pop_back();
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < p.s_max) {
            open.push_back(i);
        }
    }
    while (rest > 0 && !open.empty()) {
        const std::size_t j = rng.below(open.size());
        ++sizes[open[j]];
        --rest;
        if (sizes[open[j]] == p.s_max) {
            open[j] = open.back();
            open.pop_back();
        }
    }
    return rest == 0 && !sizes.empty();
}

/// Places nodes, largest internal degree first, into communities large
/// enough to hold their internal edges, weighting by free slots.
inline bool assign_nodes(const std::vector<std::size_t>& internal, const std::vector<std::size_t>& sizes, Rng& rng,
                         std::vector<std::size_t>& membership) {
    const std::size_t n = internal.size();
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return internal[a] > internal[b]; });

    std::vector<std::size_t> free(sizes);
    membership.assign(n, 0);
    for (NodeId v : order) {
        std::size_t slots = 0;
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            if (sizes[c] > internal[v]) {
                slots += free[c];
            }
        }
        if (slots == 0) {
            return false;
        }
        std::size_t target = rng.below(slots);
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            if (sizes[c] <= internal[v]) {
                continue;
            }
            if (target < free[c]) {
                membership[v] = c;
                --free[c];
                break;
            }
            target -= free[c];
        }
    }
    return true;
}

}

/**
 * Generates a benchmark graph with planted, non-overlapping communities.
 *
 * Degrees follow a power law with exponent gamma (redrawn until the sample
 * mean is within 5% of avg_k), community sizes a power law with exponent
 * beta_exp. Node v keeps ceil((1 - mu) k_v) of its stubs inside its
 * community; the rest go to other communities. Both stub sets are matched
 * configuration-model style with swap repair, and at most 1% of the edges
 * may be dropped. Failed attempts are retried with fresh randomness before
 * throwing InfeasibleError. Deterministic in params.rng_seed.
 */
inline PlantedGraph generate(const LfrParams& params, std::size_t max_attempts = 20) {
    const LfrParams p = resolve(params);
    Rng rng(derive_seed(p.rng_seed, {0x1f4}));
    std::string last_failure = "no attempt made";

    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        // Degrees.
        std::vector<std::size_t> degree;
        bool degrees_ok = false;
        for (int tries = 0; tries < 1000 && !degrees_ok; ++tries) {
            degree = sample_power_law(p.gamma, p.k_min, p.k_max, p.n, rng);
            const double mean = std::accumulate(degree.begin(), degree.end(), 0.0) / static_cast<double>(p.n);
            degrees_ok = std::abs(mean - p.avg_k) <= 0.05 * p.avg_k;
        }
        if (!degrees_ok) {
            last_failure = "could not draw degrees with mean within 5% of avg_k";
            continue;
        }
        std::vector<std::size_t> internal(p.n);
        for (std::size_t v = 0; v < p.n; ++v) {
            internal[v] = detail::internal_degree(degree[v], p.mu);
        }

        // Communities and placement.
        std::vector<std::size_t> sizes, membership;
        bool placed = false;
        for (int tries = 0; tries < 100 && !placed; ++tries) {
            placed = detail::draw_community_sizes(p, rng, sizes) && detail::assign_nodes(internal, sizes, rng, membership);
        }
        if (!placed) {
            last_failure = "no community layout fits the internal degrees";
            continue;
        }
        if (sizes.size() < 2 && p.mu > 0.0) {
            last_failure = "a single community cannot host external edges";
            continue;
        }

        std::vector<std::vector<NodeId>> members(sizes.size());
        for (NodeId v = 0; v < p.n; ++v) {
            members[membership[v]].push_back(v);
        }
        // Even internal stub count per community: shave one stub off the
        // member with the largest internal degree.
        for (const auto& group : members) {
            std::size_t sum = 0;
            for (NodeId v : group) {
                sum += internal[v];
            }
            if (sum % 2 == 1) {
                const NodeId top = *std::max_element(group.begin(), group.end(),
                                                     [&](NodeId a, NodeId b) { return internal[a] < internal[b]; });
                --internal[top];
                --degree[top];
            }
        }
        std::size_t external_sum = 0;
        for (std::size_t v = 0; v < p.n; ++v) {
            external_sum += degree[v] - internal[v];
        }
        if (external_sum % 2 == 1) {
            for (std::size_t v = 0; v < p.n; ++v) {
                if (degree[v] > internal[v]) {
                    --degree[v];
                    --external_sum;
                    break;
                }
            }
        }
        const std::size_t target_edges = std::accumulate(degree.begin(), degree.end(), std::size_t{0}) / 2;

        // Wiring. Each stub class gets a swap budget of 100 times its edge
        // count. A community the configuration model cannot wire cleanly is
        // rebuilt from its degree sequence instead.
        std::size_t dropped = 0;
        std::vector<Edge> edges;
        edges.reserve(target_edges);
        for (const auto& group : members) {
            std::vector<NodeId> stubs;
            std::vector<std::size_t> group_degree;
            for (NodeId v : group) {
                stubs.insert(stubs.end(), internal[v], v);
                group_degree.push_back(internal[v]);
            }
            const std::size_t group_edges = stubs.size() / 2;
            std::size_t budget = 100 * group_edges;
            std::vector<Edge> wired;
            std::size_t lost = detail::match_stubs(stubs, [](NodeId, NodeId) { return true; }, rng, budget, wired);
            if (lost > 0) {
                std::vector<Edge> rebuilt;
                const std::size_t rebuilt_lost = detail::havel_hakimi(group, group_degree, rng, 10 * group_edges, rebuilt);
                if (rebuilt_lost < lost) {
                    wired.swap(rebuilt);
                    lost = rebuilt_lost;
                }
            }
            dropped += lost;
            edges.insert(edges.end(), wired.begin(), wired.end());
        }
        std::vector<NodeId> stubs;
        stubs.reserve(external_sum);
        for (NodeId v = 0; v < p.n; ++v) {
            stubs.insert(stubs.end(), degree[v] - internal[v], v);
        }
        std::size_t budget = 100 * (external_sum / 2);
        dropped += detail::match_stubs(
            stubs, [&](NodeId a, NodeId b) { return membership[a] != membership[b]; }, rng, budget, edges);

        if (static_cast<double>(dropped) > 0.01 * static_cast<double>(target_edges)) {
            last_failure = std::to_string(dropped) + " of " + std::to_string(target_edges) +
                           " edges could not be placed (limit 1%)";
            continue;
        }

        std::size_t duplicates = 0;
        PlantedGraph out;
        out.graph = Graph::from_edges(p.n, edges, {}, &duplicates);
        if (duplicates != 0) {
            throw std::logic_error("benchmark wiring produced duplicate edges");
        }
        out.membership = std::move(membership);
        out.community_sizes = std::move(sizes);
        out.params = p;
        out.dropped_edges = dropped;
        out.attempts = attempt;
        return out;
    }
    throw InfeasibleError("benchmark generation failed after " + std::to_string(max_attempts) +
                          " attempts: " + last_failure);
}

/// Fraction of edges whose endpoints lie in different planted communities.
inline double mixing_fraction(const PlantedGraph& pg) {
    std::size_t across = 0;
    const auto edges = pg.graph.edges();
    for (const auto& [u, v] : edges) {
        across += pg.membership[u] != pg.membership[v];
    }
    return edges.empty() ? 0.0 : static_cast<double>(across) / static_cast<double>(edges.size());
}

struct SeedSample {
    SeedSet seeds;
    std::vector<std::size_t> unseeded;  // communities without any seed
    std::size_t attempts = 0;
};

/**
 * Uniform seed subset of size round(sigma n) with indicator affinities of
 * the planted communities. Redraws up to `max_attempts` times to give every
 * community a seed; communities still uncovered are listed in `unseeded`.
 */
inline SeedSample sample_seeds(const PlantedGraph& pg, double sigma, Rng& rng, std::size_t max_attempts = 100) {
    const std::size_t n = pg.graph.num_nodes();
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw std::invalid_argument("sigma must lie in (0, 1]");
    }
    if (std::floor(sigma * static_cast<double>(n)) < 1.0) {
        throw std::invalid_argument("sigma * n must be at least 1");
    }
    const std::size_t k = std::min(n, static_cast<std::size_t>(std::llround(sigma * static_cast<double>(n))));
    const std::size_t l = pg.communities();

    std::vector<NodeId> pool(n);
    SeedSample best{SeedSet(l), {}, 0};
    std::size_t best_uncovered = l + 1;
    for (std::size_t attempt = 1; attempt <= std::max<std::size_t>(1, max_attempts); ++attempt) {
        std::iota(pool.begin(), pool.end(), NodeId{0});
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(pool[i], pool[i + rng.below(n - i)]);
        }
        std::vector<char> covered(l, 0);
        for (std::size_t i = 0; i < k; ++i) {
            covered[pg.membership[pool[i]]] = 1;
        }
        const auto uncovered = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), 0));
        if (uncovered < best_uncovered) {
            best_uncovered = uncovered;
            best.seeds = SeedSet(l);
            for (std::size_t i = 0; i < k; ++i) {
                best.seeds.set_indicator(pool[i], pg.membership[pool[i]]);
            }
            best.unseeded.clear();
            for (std::size_t c = 0; c < l; ++c) {
                if (!covered[c]) {
                    best.unseeded.push_back(c);
                }
            }
        }
        best.attempts = attempt;
        if (uncovered == 0) {
            break;
        }
    }
    return best;
}

inline void write_ground_truth(std::ostream& out, const PlantedGraph& pg) {
    for (NodeId v = 0; v < pg.graph.num_nodes(); ++v) {
        out << pg.graph.label(v) << ' ' << pg.membership[v] << '\n';
    }
}

/// Reads `label community` lines against the node labels of `g`. Every node must appear exactly once.
inline std::vector<std::size_t> load_ground_truth(std::istream& in, const Graph& g) {
    std::vector<std::size_t> membership(g.num_nodes(), std::numeric_limits<std::size_t>::max());
    std::string line;
    std::size_t lineno = 0, seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string label;
        long long community = -1;
        if (!(fields >> label) || label.front() == '#') {
            continue;
        }
        if (!(fields >> community) || community < 0) {
            throw ParseError("expected 'node community'", lineno);
        }
        auto v = g.find(label);
        if (!v) {
            throw ParseError("unknown node '" + label + "'", lineno);
        }
        if (membership[*v] != std::numeric_limits<std::size_t>::max()) {
            throw ParseError("node '" + label + "' listed twice", lineno);
        }
        membership[*v] = static_cast<std::size_t>(community);
        ++seen;
    }
    if (seen != g.num_nodes()) {
        throw ParseError("ground truth covers " + std::to_string(seen) + " of " + std::to_string(g.num_nodes()) +
                         " nodes");
    }
    return membership;
}

}

#endif
