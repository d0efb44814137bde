#ifndef SEEDCD_DETECT_HPP
#define SEEDCD_DETECT_HPP

#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seedcd/error.hpp"
#include "seedcd/graph.hpp"
#include "seedcd/markov.hpp"
#include "seedcd/parallel.hpp"
#include "seedcd/seed_set.hpp"
#include "seedcd/solver.hpp"

namespace seedcd {

enum class SolverMode { iterative, direct };

inline std::string_view to_string(SolverMode mode) {
    return mode == SolverMode::direct ? "direct" : "iterative";
}

inline SolverMode parse_solver_mode(std::string_view text) {
    if (text == "direct") {
        return SolverMode::direct;
    }
    if (text == "iterative") {
        return SolverMode::iterative;
    }
    throw std::invalid_argument("unknown solver mode '" + std::string(text) + "'");
}

struct DetectOptions {
    SolverMode mode = SolverMode::iterative;
    double tolerance = default_tolerance;
    std::size_t max_iterations = 0;  // 0: 10 * dim + 100
    std::size_t dense_cap = default_dense_cap;
    std::size_t jobs = 1;
};

/**
 * Computed affinities of the non-seed nodes: row i belongs to node
 * `nodes[i]` (ascending id), column c to community c. Values are the raw
 * solver output and may leave [0,1] by up to the solver tolerance; use
 * `clamped` at output boundaries.
 */
struct AffinityMatrix {
    std::vector<NodeId> nodes;
    std::size_t communities = 0;
    std::vector<double> values;        // row-major, nodes.size() x communities
    std::vector<SolveReport> reports;  // one per community

    std::size_t rows() const { return nodes.size(); }
    double operator()(std::size_t row, std::size_t community) const { return values[row * communities + community]; }

    std::span<const double> row(std::size_t r) const { return {values.data() + r * communities, communities}; }

    static double clamped(double v) {
        if (!(v > 0.0)) {
            return 0.0;
        }
        return v < 1.0 ? v : 1.0;
    }
};

/// Affinities of every non-seed node as absorption-weighted mixtures of
/// the seed affinities: one system assembly, one solve per community.
/// Throws ReachabilityError, std::invalid_argument for bad seeds, and
/// SolverError when an iterative solve does not converge.
inline AffinityMatrix detect_multi(const Graph& g, const SeedSet& seeds, const DetectOptions& opts = {}) {
    if (seeds.empty()) {
        throw std::invalid_argument("seed set is empty");
    }
    const auto seed_nodes = seeds.nodes();
    const AbsorbingChain chain = build_chain(g, seed_nodes);
    const AbsorbingSystem sys = assemble(chain, seeds);

    AffinityMatrix out;
    const auto transient = chain.transient_nodes();
    out.nodes.assign(transient.begin(), transient.end());
    out.communities = seeds.communities();
    out.values.assign(out.nodes.size() * out.communities, 0.0);
    out.reports.assign(out.communities, SolveReport{});
    if (sys.dim == 0) {
        for (auto& r : out.reports) {
            r.converged = true;
        }
        return out;
    }

    std::optional<DirectSolver> direct;
    if (opts.mode == SolverMode::direct) {
        direct.emplace(sys, opts.dense_cap);
    }
    parallel_for(out.communities, opts.jobs, [&](std::size_t c) {
        std::vector<double> x;
        if (direct) {
            x = direct->solve(c);
            out.reports[c] = {0, relative_residual(sys, x, sys.rhs_column(c)), true};
        } else {
            auto [solution, report] = solve_iterative(sys, c, opts.tolerance, opts.max_iterations);
            x = std::move(solution);
            out.reports[c] = report;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.values[i * out.communities + c] = x[i];
        }
    });

    for (std::size_t c = 0; c < out.communities; ++c) {
        if (!out.reports[c].converged) {
            throw SolverError("community " + std::to_string(c) + " did not converge: relative residual " +
                              std::to_string(out.reports[c].relative_residual) + " after " +
                              std::to_string(out.reports[c].iterations) + " iterations");
        }
    }
    return out;
}

inline AffinityMatrix detect_single(const Graph& g, const SeedSet& seeds, const DetectOptions& opts = {}) {
    if (seeds.communities() != 1) {
        throw std::invalid_argument("single-community detection needs exactly one community, got " +
                                    std::to_string(seeds.communities()));
    }
    return detect_multi(g, seeds, opts);
}

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i) {
        if (row[i] > row[best]) {
            best = i;
        }
    }
    return best;
}

struct CrispEntry {
    NodeId node;
    std::size_t community;
};

/// Crisp assignment of the non-seed nodes, in row order.
inline std::vector<CrispEntry> assign_crisp(const AffinityMatrix& aff) {
    if (aff.communities == 0) {
        throw std::invalid_argument("affinity matrix has no communities");
    }
    std::vector<CrispEntry> out;
    out.reserve(aff.rows());
    for (std::size_t r = 0; r < aff.rows(); ++r) {
        out.push_back({aff.nodes[r], argmax(aff.row(r))});
    }
    return out;
}

inline constexpr std::size_t unassigned = std::numeric_limits<std::size_t>::max();

/// Crisp community of every node 0..n-1: seeds by argmax of their given
/// affinities, non-seeds by argmax of the computed ones. Nodes covered by
/// neither are `unassigned`.
inline std::vector<std::size_t> crisp_membership(const AffinityMatrix& aff, const SeedSet& seeds, std::size_t n) {
    std::vector<std::size_t> out(n, unassigned);
    for (const auto& [node, row] : seeds.rows()) {
        out.at(node) = argmax(row);
    }
    for (const auto& e : assign_crisp(aff)) {
        out.at(e.node) = e.community;
    }
    return out;
}

inline std::string format_affinity(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", AffinityMatrix::clamped(v));
    return buf;
}

/// `node,c0,...,c{l-1}` for every node in id order; seeds carry their given
/// affinities. Values are clamped to [0,1] and printed with 9 significant digits.
inline void write_affinity_csv(std::ostream& out, const Graph& g, const AffinityMatrix& aff, const SeedSet& seeds) {
    out << "node";
    for (std::size_t c = 0; c < aff.communities; ++c) {
        out << ",c" << c;
    }
    out << '\n';
    std::size_t r = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        std::span<const double> row;
        if (seeds.contains(v)) {
            row = seeds.affinity(v);
        } else if (r < aff.rows() && aff.nodes[r] == v) {
            row = aff.row(r++);
        } else {
            continue;
        }
        out << g.label(v);
        for (double x : row) {
            out << ',' << format_affinity(x);
        }
        out << '\n';
    }
}

inline void write_crisp_csv(std::ostream& out, const Graph& g, std::span<const std::size_t> membership) {
    out << "node,community\n";
    for (NodeId v = 0; v < membership.size(); ++v) {
        if (membership[v] != unassigned) {
            out << g.label(v) << ',' << membership[v] << '\n';
        }
    }
}

}

#endif
