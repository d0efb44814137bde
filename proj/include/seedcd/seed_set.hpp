#ifndef SEEDCD_SEED_SET_HPP
#define SEEDCD_SEED_SET_HPP

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedcd/error.hpp"
#include "seedcd/graph.hpp"

namespace seedcd {

/// Seed nodes with their given community affinities, one row of length
/// `communities()` per seed. Every entry lies in [0,1].
class SeedSet {
public:
    explicit SeedSet(std::size_t communities = 1) : communities_(communities) {
        if (communities == 0) {
            throw std::invalid_argument("a seed set needs at least one community");
        }
    }

    void set(NodeId node, std::vector<double> affinity) {
        if (affinity.size() != communities_) {
            throw std::invalid_argument("affinity row of node " + std::to_string(node) + " has " +
                                        std::to_string(affinity.size()) + " entries, expected " +
                                        std::to_string(communities_));
        }
        for (double a : affinity) {
            check_affinity(a, node);
        }
        rows_[node] = std::move(affinity);
    }

    /// Indicator row: affinity 1 for `community`, 0 elsewhere.
    void set_indicator(NodeId node, std::size_t community) {
        std::vector<double> row(communities_, 0.0);
        row.at(community) = 1.0;
        rows_[node] = std::move(row);
    }

    std::size_t communities() const { return communities_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    bool contains(NodeId node) const { return rows_.count(node) != 0; }

    const std::vector<double>& affinity(NodeId node) const {
        auto it = rows_.find(node);
        if (it == rows_.end()) {
            throw std::out_of_range("node " + std::to_string(node) + " is not a seed");
        }
        return it->second;
    }

    /// Ascending seed ids.
    std::vector<NodeId> nodes() const {
        std::vector<NodeId> out;
        out.reserve(rows_.size());
        for (const auto& entry : rows_) {
            out.push_back(entry.first);
        }
        return out;
    }

    const std::map<NodeId, std::vector<double>>& rows() const { return rows_; }

    static void check_affinity(double a, NodeId node) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw std::invalid_argument("affinity " + std::to_string(a) + " of node " + std::to_string(node) +
                                        " is outside [0,1]");
        }
    }

private:
    std::size_t communities_;
    std::map<NodeId, std::vector<double>> rows_;
};

/**
 * Reads `label community affinity` lines. A label may repeat with different
 * community indices; unlisted (seed, community) pairs get affinity 0. The
 * indices present must cover 0..l-1 exactly.
 */
inline SeedSet load_seed_file(std::istream& in, const Graph& g) {
    struct Entry {
        NodeId node;
        std::size_t community;
        double affinity;
    };
    std::vector<Entry> entries;
    std::size_t max_community = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::string label;
        if (!(fields >> label) || label.front() == '#') {
            continue;
        }
        long long community = -1;
        std::string affinity_text, extra;
        if (!(fields >> community >> affinity_text) || (fields >> extra && extra.front() != '#')) {
            throw ParseError("expected 'node community affinity'", lineno);
        }
        if (community < 0) {
            throw ParseError("negative community index", lineno);
        }
        double affinity = 0.0;
        try {
            std::size_t pos = 0;
            affinity = std::stod(affinity_text, &pos);
            if (pos != affinity_text.size()) {
                throw std::invalid_argument("trailing characters");
            }
        } catch (const std::exception&) {
            throw ParseError("bad affinity '" + affinity_text + "'", lineno);
        }
        if (!(affinity >= 0.0 && affinity <= 1.0)) {
            throw ParseError("affinity " + affinity_text + " is outside [0,1]", lineno);
        }
        auto node = g.find(label);
        if (!node) {
            throw ParseError("unknown node '" + label + "'", lineno);
        }
        entries.push_back({*node, static_cast<std::size_t>(community), affinity});
        max_community = std::max(max_community, static_cast<std::size_t>(community));
    }
    if (entries.empty()) {
        throw ParseError("seed file is empty");
    }

    const std::size_t l = max_community + 1;
    std::vector<char> used(l, 0);
    std::map<NodeId, std::vector<double>> rows;
    std::map<std::pair<NodeId, std::size_t>, bool> seen;
    for (const auto& e : entries) {
        if (!seen.emplace(std::make_pair(e.node, e.community), true).second) {
            throw ParseError("node '" + g.label(e.node) + "' listed twice for community " +
                             std::to_string(e.community));
        }
        auto& row = rows[e.node];
        row.resize(l, 0.0);
        row[e.community] = e.affinity;
        used[e.community] = 1;
    }
    for (std::size_t i = 0; i < l; ++i) {
        if (!used[i]) {
            throw ParseError("community indices are not dense: " + std::to_string(i) + " is missing");
        }
    }

    SeedSet seeds(l);
    for (auto& [node, row] : rows) {
        seeds.set(node, std::move(row));
    }
    return seeds;
}

/// Writes nonzero entries only. A community with no nonzero entry gets one
/// explicit zero line so that the index range survives a reload.
inline void write_seed_file(std::ostream& out, const Graph& g, const SeedSet& seeds) {
    std::ostringstream text;
    text.precision(17);
    std::vector<char> used(seeds.communities(), 0);
    for (const auto& [node, row] : seeds.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] != 0.0) {
                text << g.label(node) << ' ' << i << ' ' << row[i] << '\n';
                used[i] = 1;
            }
        }
    }
    if (!seeds.empty()) {
        const NodeId first = seeds.rows().begin()->first;
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (!used[i]) {
                text << g.label(first) << ' ' << i << " 0\n";
            }
        }
    }
    out << text.str();
}

}

#endif
