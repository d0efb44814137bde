#ifndef SEEDCD_MARKOV_HPP
#define SEEDCD_MARKOV_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seedcd/error.hpp"
#include "seedcd/graph.hpp"

namespace seedcd {

class AbsorbingChain;
inline AbsorbingChain build_chain(const Graph& g, std::span<const NodeId> seeds);

/**
 * Random walk on an undirected graph in which the seed nodes absorb.
 *
 * A walk at a transient node moves to a uniformly chosen neighbor in the
 * original graph; a walk that reaches a seed stays there forever. The
 * transition matrix is never materialized: callers iterate rows. Transient
 * states are numbered in ascending node-id order, as are absorbing states.
 */
class AbsorbingChain {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    const Graph& graph() const { return *graph_; }

    std::size_t num_transient() const { return transient_.size(); }
    std::size_t num_absorbing() const { return seeds_.size(); }

    /// Node ids of transient states, ascending.
    std::span<const NodeId> transient_nodes() const { return transient_; }
    /// Node ids of absorbing states (seeds), ascending.
    std::span<const NodeId> seed_nodes() const { return seeds_; }

    bool is_seed(NodeId v) const { return absorbing_index(v) != npos; }

    std::size_t transient_index(NodeId v) const { return v < index_.size() && !absorbing_[v] ? index_[v] : npos; }
    std::size_t absorbing_index(NodeId v) const { return v < index_.size() && absorbing_[v] ? index_[v] : npos; }

    /// Outgoing transitions of transient node v: each neighbor with probability 1/deg(v).
    std::vector<std::pair<NodeId, double>> transition_row(NodeId v) const {
        if (v >= graph_->num_nodes()) {
            throw std::out_of_range("node id " + std::to_string(v) + " out of range");
        }
        if (absorbing_[v]) {
            throw std::invalid_argument("node " + std::to_string(v) + " is absorbing");
        }
        auto nb = graph_->neighbors(v);
        const double p = 1.0 / static_cast<double>(nb.size());
        std::vector<std::pair<NodeId, double>> row;
        row.reserve(nb.size());
        for (NodeId w : nb) {
            row.emplace_back(w, p);
        }
        return row;
    }

private:
    friend AbsorbingChain build_chain(const Graph& g, std::span<const NodeId> seeds);

    const Graph* graph_ = nullptr;
    std::vector<NodeId> transient_;
    std::vector<NodeId> seeds_;
    std::vector<char> absorbing_;
    std::vector<std::size_t> index_;
};

/// The graph must outlive the chain. Throws ReachabilityError listing every
/// transient node that cannot reach a seed.
inline AbsorbingChain build_chain(const Graph& g, std::span<const NodeId> seeds) {
    auto unreachable = check_seed_reachability(g, seeds);
    if (!unreachable.empty()) {
        throw ReachabilityError(std::vector<std::size_t>(unreachable.begin(), unreachable.end()));
    }
    AbsorbingChain c;
    c.graph_ = &g;
    c.absorbing_.assign(g.num_nodes(), 0);
    for (NodeId s : seeds) {
        c.absorbing_[s] = 1;
    }
    c.index_.assign(g.num_nodes(), 0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (c.absorbing_[v]) {
            c.index_[v] = c.seeds_.size();
            c.seeds_.push_back(v);
        } else {
            c.index_[v] = c.transient_.size();
            c.transient_.push_back(v);
        }
    }
    return c;
}

AbsorbingChain build_chain(const Graph&&, std::span<const NodeId>) = delete;

}

#endif
