// Shared fixtures and reference computations for the test suites. The
// dense oracle here works on the transition form I - Q directly and shares
// no code with the library's solver.
#ifndef SEEDCD_TESTS_SUPPORT_HPP
#define SEEDCD_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seedcd/graph.hpp"
#include "seedcd/rng.hpp"
#include "seedcd/seed_set.hpp"

namespace seedcd::test {

inline std::string data_path(const std::string& name) { return std::string(SEEDCD_TEST_DATA) + "/" + name; }

inline Graph load_fixture(const std::string& name) {
    std::ifstream in(data_path(name));
    if (!in) {
        throw std::runtime_error("missing fixture " + name);
    }
    return load_edge_list(in);
}

inline SeedSet load_seed_fixture(const std::string& name, const Graph& g) {
    std::ifstream in(data_path(name));
    return load_seed_file(in, g);
}

inline Graph graph_from_text(const std::string& text) {
    std::istringstream in(text);
    return load_edge_list(in);
}

/// s - v1 - ... - vk - t, with ids s = 0, vi = i, t = k + 1.
inline Graph path_graph(std::size_t k) {
    std::vector<Edge> edges;
    for (NodeId i = 0; i <= k; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return Graph::from_edges(k + 2, edges);
}

/// Random spanning tree plus `extra` random chords.
inline Graph random_connected_graph(std::size_t n, std::size_t extra, Rng& rng) {
    std::vector<Edge> edges;
    for (NodeId v = 1; v < n; ++v) {
        edges.emplace_back(static_cast<NodeId>(rng.below(v)), v);
    }
    for (std::size_t e = 0; e < extra; ++e) {
        auto a = static_cast<NodeId>(rng.below(n));
        auto b = static_cast<NodeId>(rng.below(n));
        if (a != b) {
            edges.emplace_back(a, b);
        }
    }
    return Graph::from_edges(n, edges);
}

/// Distinct random node ids.
inline std::vector<NodeId> random_subset(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<NodeId> all(n);
    for (NodeId v = 0; v < n; ++v) {
        all[v] = v;
    }
    shuffle(all.begin(), all.end(), rng);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

/**
 * Absorption-weighted affinity of every node for one community, from the
 * transition form: x = Q x + R beta, solved by Gaussian elimination with
 * partial pivoting on I - Q. Seeds keep their own value.
 */
inline std::vector<double> oracle_affinity(const Graph& g, const SeedSet& seeds, std::size_t community) {
    const std::size_t n = g.num_nodes();
    std::vector<long> index(n, -1);
    std::vector<NodeId> transient;
    for (NodeId v = 0; v < n; ++v) {
        if (!seeds.contains(v)) {
            index[v] = static_cast<long>(transient.size());
            transient.push_back(v);
        }
    }
    const std::size_t t = transient.size();
    std::vector<std::vector<double>> m(t, std::vector<double>(t + 1, 0.0));
    for (std::size_t i = 0; i < t; ++i) {
        const NodeId v = transient[i];
        const double p = 1.0 / static_cast<double>(g.degree(v));
        m[i][i] = 1.0;
        for (NodeId w : g.neighbors(v)) {
            if (index[w] >= 0) {
                m[i][static_cast<std::size_t>(index[w])] -= p;
            } else {
                m[i][t] += p * seeds.affinity(w)[community];
            }
        }
    }
    for (std::size_t col = 0; col < t; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < t; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) {
                pivot = r;
            }
        }
        std::swap(m[col], m[pivot]);
        if (std::abs(m[col][col]) < 1e-14) {
            throw std::runtime_error("oracle: singular system");
        }
        for (std::size_t r = 0; r < t; ++r) {
            if (r == col || m[r][col] == 0.0) {
                continue;
            }
            const double f = m[r][col] / m[col][col];
            for (std::size_t k = col; k <= t; ++k) {
                m[r][k] -= f * m[col][k];
            }
        }
    }
    std::vector<double> out(n, 0.0);
    for (const auto& [node, row] : seeds.rows()) {
        out[node] = row[community];
    }
    for (std::size_t i = 0; i < t; ++i) {
        out[transient[i]] = m[i][t] / m[i][i];
    }
    return out;
}

}

#endif
