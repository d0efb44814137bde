#ifndef SEEDCD_GRAPH_HPP
#define SEEDCD_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seedcd/error.hpp"

namespace seedcd {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/**
 * Immutable undirected simple graph in compressed sparse row form.
 *
 * Every undirected edge {u,v} is stored twice, once in each endpoint's
 * neighbor list. Lists are sorted ascending and free of duplicates and
 * self-loops. Nodes carry optional external labels; without them the
 * decimal id is the label.
 */
class Graph {
public:
    Graph() : offsets_(1, 0) {}

    /// Builds a graph on nodes 0..n-1. Duplicate edges are collapsed and
    /// counted in `duplicates` when given; self-loops throw.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                            std::vector<std::string> labels = {},
                            std::size_t* duplicates = nullptr) {
        if (!labels.empty() && labels.size() != n) {
            throw std::invalid_argument("label count does not match node count");
        }
        std::vector<std::size_t> counts(n + 1, 0);
        for (const auto& [u, v] : edges) {
            if (u >= n || v >= n) {
                throw std::out_of_range("edge endpoint out of range");
            }
            if (u == v) {
                throw std::invalid_argument("self-loop at node " + std::to_string(u));
            }
            ++counts[u + 1];
            ++counts[v + 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            counts[i + 1] += counts[i];
        }

        std::vector<NodeId> raw(counts[n]);
        std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
        for (const auto& [u, v] : edges) {
            raw[fill[u]++] = v;
            raw[fill[v]++] = u;
        }

        Graph g;
        g.offsets_.assign(n + 1, 0);
        g.targets_.reserve(raw.size());
        for (std::size_t i = 0; i < n; ++i) {
            auto first = raw.begin() + static_cast<std::ptrdiff_t>(counts[i]);
            auto last = raw.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
            std::sort(first, last);
            last = std::unique(first, last);
            g.targets_.insert(g.targets_.end(), first, last);
            g.offsets_[i + 1] = g.targets_.size();
        }
        g.targets_.shrink_to_fit();
        if (duplicates) {
            *duplicates = (raw.size() - g.targets_.size()) / 2;
        }
        g.labels_ = std::move(labels);
        g.index_labels();
        return g;
    }

    std::size_t num_nodes() const { return offsets_.size() - 1; }
    std::size_t num_edges() const { return targets_.size() / 2; }

    std::size_t degree(NodeId v) const {
        check(v);
        return offsets_[v + 1] - offsets_[v];
    }

    std::span<const NodeId> neighbors(NodeId v) const {
        check(v);
        return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    bool has_edge(NodeId u, NodeId v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    std::span<const std::size_t> offsets() const { return offsets_; }
    std::span<const NodeId> targets() const { return targets_; }

    bool has_labels() const { return !labels_.empty(); }

    std::string label(NodeId v) const {
        check(v);
        return labels_.empty() ? std::to_string(v) : labels_[v];
    }

    std::optional<NodeId> find(const std::string& label) const {
        if (labels_.empty()) {
            std::size_t pos = 0;
            unsigned long long id = 0;
            try {
                id = std::stoull(label, &pos);
            } catch (const std::exception&) {
                return std::nullopt;
            }
            if (pos != label.size() || id >= num_nodes()) {
                return std::nullopt;
            }
            return static_cast<NodeId>(id);
        }
        auto it = by_label_.find(label);
        if (it == by_label_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Each undirected edge once, as (u, v) with u < v, in ascending order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(num_edges());
        for (NodeId u = 0; u < num_nodes(); ++u) {
            for (NodeId v : neighbors(u)) {
                if (u < v) {
                    out.emplace_back(u, v);
                }
            }
        }
        return out;
    }

private:
    void check(NodeId v) const {
        if (v >= num_nodes()) {
            throw std::out_of_range("node id " + std::to_string(v) + " out of range (n=" +
                                    std::to_string(num_nodes()) + ")");
        }
    }

    void index_labels() {
        by_label_.clear();
        by_label_.reserve(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!by_label_.emplace(labels_[i], static_cast<NodeId>(i)).second) {
                throw std::invalid_argument("duplicate node label '" + labels_[i] + "'");
            }
        }
    }

    std::vector<std::size_t> offsets_;
    std::vector<NodeId> targets_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> by_label_;
};

struct LoadReport {
    std::size_t lines = 0;
    std::size_t duplicate_edges = 0;
};

/// Reads a whitespace-separated edge list. Labels are re-indexed densely in
/// order of first appearance. Lines that are blank or start with '#' are skipped.
inline Graph load_edge_list(std::istream& in, LoadReport* report = nullptr) {
    std::unordered_map<std::string, NodeId> ids;
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    auto intern = [&](const std::string& label) {
        auto [it, fresh] = ids.emplace(label, static_cast<NodeId>(labels.size()));
        if (fresh) {
            labels.push_back(label);
        }
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a) || a.front() == '#') {
            continue;
        }
        if (!(fields >> b) || (fields >> extra && extra.front() != '#')) {
            throw ParseError("expected two node labels", lineno);
        }
        if (a == b) {
            throw ParseError("self-loop at node '" + a + "'", lineno);
        }
        const NodeId u = intern(a);
        const NodeId v = intern(b);
        edges.emplace_back(u, v);
    }
    if (edges.empty()) {
        throw ParseError("edge list is empty");
    }

    std::size_t duplicates = 0;
    const std::size_t n = labels.size();
    Graph g = Graph::from_edges(n, edges, std::move(labels), &duplicates);
    if (report) {
        report->lines = lineno;
        report->duplicate_edges = duplicates;
    }
    return g;
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    for (const auto& [u, v] : g.edges()) {
        out << g.label(u) << ' ' << g.label(v) << '\n';
    }
}

/// Nodes with no path to any seed, ascending. Empty means every node reaches a seed.
inline std::vector<NodeId> check_seed_reachability(const Graph& g, std::span<const NodeId> seeds) {
    if (seeds.empty()) {
        throw std::invalid_argument("seed set is empty");
    }
    std::vector<char> seen(g.num_nodes(), 0);
    std::vector<NodeId> frontier;
    frontier.reserve(g.num_nodes());
    for (NodeId s : seeds) {
        if (s >= g.num_nodes()) {
            throw std::out_of_range("seed id " + std::to_string(s) + " out of range");
        }
        if (!seen[s]) {
            seen[s] = 1;
            frontier.push_back(s);
        }
    }
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        for (NodeId w : g.neighbors(frontier[head])) {
            if (!seen[w]) {
                seen[w] = 1;
                frontier.push_back(w);
            }
        }
    }
    std::vector<NodeId> unreachable;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (!seen[v]) {
            unreachable.push_back(v);
        }
    }
    return unreachable;
}

/// Subgraph induced by the nodes with keep[v] set. `old_ids[i]` is the
/// original id of new node i. Labels carry over.
inline Graph induced_subgraph(const Graph& g, std::span<const char> keep, std::vector<NodeId>& old_ids) {
    std::vector<NodeId> remap(g.num_nodes(), 0);
    old_ids.clear();
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (keep[v]) {
            remap[v] = static_cast<NodeId>(old_ids.size());
            old_ids.push_back(v);
        }
    }
    std::vector<Edge> edges;
    for (const auto& [u, v] : g.edges()) {
        if (keep[u] && keep[v]) {
            edges.emplace_back(remap[u], remap[v]);
        }
    }
    std::vector<std::string> labels;
    if (g.has_labels()) {
        labels.reserve(old_ids.size());
        for (NodeId v : old_ids) {
            labels.push_back(g.label(v));
        }
    }
    return Graph::from_edges(old_ids.size(), edges, std::move(labels));
}

}

#endif
