#ifndef SEEDCD_SOLVER_HPP
#define SEEDCD_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seedcd/error.hpp"
#include "seedcd/markov.hpp"
#include "seedcd/seed_set.hpp"

namespace seedcd {

/**
 * The linear system (D - A) x = b_i over the transient nodes, one
 * right-hand side per community.
 *
 * D holds the degree of each transient node in the full graph and A the
 * adjacency among transient nodes. Entry v of b_i is the sum of beta_i(s)
 * over the seed neighbors s of v. The matrix is symmetric and diagonally
 * dominant; the dominance is strict on every node with a seed neighbor.
 */
struct AbsorbingSystem {
    std::size_t dim = 0;
    std::size_t communities = 0;
    std::vector<double> diag;
    std::vector<std::size_t> offsets;  // CSR over transient indices
    std::vector<std::size_t> columns;
    std::vector<double> rhs;           // column-major, dim x communities

    std::span<const double> rhs_column(std::size_t community) const {
        if (community >= communities) {
            throw std::out_of_range("community index " + std::to_string(community) + " out of range");
        }
        return {rhs.data() + community * dim, dim};
    }

    /// y = (D - A) x
    void multiply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < dim; ++i) {
            double acc = diag[i] * x[i];
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
                acc -= x[columns[k]];
            }
            y[i] = acc;
        }
    }

    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(dim);
        multiply(x, y);
        return y;
    }
};

struct SolveReport {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

inline AbsorbingSystem assemble(const AbsorbingChain& chain, const SeedSet& seeds) {
    const auto seed_nodes = chain.seed_nodes();
    if (seeds.size() != seed_nodes.size()) {
        throw std::invalid_argument("seed set has " + std::to_string(seeds.size()) + " seeds, chain has " +
                                    std::to_string(seed_nodes.size()));
    }
    for (const auto& [node, row] : seeds.rows()) {
        if (!chain.is_seed(node)) {
            throw std::invalid_argument("node " + std::to_string(node) + " is not a seed of the chain");
        }
        if (row.size() != seeds.communities()) {
            throw std::invalid_argument("community count mismatch at seed " + std::to_string(node));
        }
        for (double a : row) {
            SeedSet::check_affinity(a, node);
        }
    }

    const Graph& g = chain.graph();
    AbsorbingSystem sys;
    sys.dim = chain.num_transient();
    sys.communities = seeds.communities();
    sys.diag.resize(sys.dim);
    sys.offsets.assign(sys.dim + 1, 0);
    sys.rhs.assign(sys.dim * sys.communities, 0.0);

    // Seed rows indexed by absorbing index, to avoid map lookups per edge.
    std::vector<const std::vector<double>*> seed_rows(seed_nodes.size());
    for (std::size_t j = 0; j < seed_nodes.size(); ++j) {
        seed_rows[j] = &seeds.affinity(seed_nodes[j]);
    }

    const auto transient = chain.transient_nodes();
    for (std::size_t i = 0; i < sys.dim; ++i) {
        const NodeId v = transient[i];
        sys.diag[i] = static_cast<double>(g.degree(v));
        for (NodeId w : g.neighbors(v)) {
            if (std::size_t t = chain.transient_index(w); t != AbsorbingChain::npos) {
                sys.columns.push_back(t);
            } else {
                const auto& row = *seed_rows[chain.absorbing_index(w)];
                for (std::size_t c = 0; c < sys.communities; ++c) {
                    sys.rhs[c * sys.dim + i] += row[c];
                }
            }
        }
        sys.offsets[i + 1] = sys.columns.size();
    }
    return sys;
}

/// Weak diagonal dominance on every row: diag[i] >= number of off-diagonal entries.
inline bool is_diagonally_dominant(const AbsorbingSystem& sys) {
    for (std::size_t i = 0; i < sys.dim; ++i) {
        if (sys.diag[i] < static_cast<double>(sys.offsets[i + 1] - sys.offsets[i])) {
            return false;
        }
    }
    return true;
}

inline double norm2(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

inline double relative_residual(const AbsorbingSystem& sys, std::span<const double> x, std::span<const double> b) {
    auto ax = sys.multiply(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < sys.dim; ++i) {
        const double d = ax[i] - b[i];
        acc += d * d;
    }
    const double nb = norm2(b);
    return nb == 0.0 ? std::sqrt(acc) : std::sqrt(acc) / nb;
}

inline constexpr std::size_t default_dense_cap = 2000;

/// Dense Cholesky factorization of D - A, built once and reused for every
/// community. Intended as the exact reference for small systems.
class DirectSolver {
public:
    explicit DirectSolver(const AbsorbingSystem& sys, std::size_t dense_cap = default_dense_cap) : sys_(&sys) {
        if (sys.dim > dense_cap) {
            throw std::length_error("system dimension " + std::to_string(sys.dim) + " exceeds the dense cap " +
                                    std::to_string(dense_cap));
        }
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys.dim), static_cast<Eigen::Index>(sys.dim));
        for (std::size_t i = 0; i < sys.dim; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            m(r, r) = sys.diag[i];
            for (std::size_t k = sys.offsets[i]; k < sys.offsets[i + 1]; ++k) {
                m(r, static_cast<Eigen::Index>(sys.columns[k])) -= 1.0;
            }
        }
        llt_.compute(m);
        if (llt_.info() != Eigen::Success) {
            throw SolverError("transient system is singular; some transient component has no seed neighbor");
        }
    }

    std::vector<double> solve(std::size_t community) const {
        const auto b = sys_->rhs_column(community);
        std::vector<double> x(sys_->dim, 0.0);
        if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; })) {
            return x;
        }
        Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
        Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        xv = llt_.solve(bv);
        return x;
    }

private:
    const AbsorbingSystem* sys_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

inline std::vector<double> solve_direct(const AbsorbingSystem& sys, std::size_t community,
                                        std::size_t dense_cap = default_dense_cap) {
    return DirectSolver(sys, dense_cap).solve(community);
}

inline constexpr double default_tolerance = 1e-8;

inline std::size_t default_max_iterations(std::size_t dim) { return 10 * dim + 100; }

/**
 * Jacobi-preconditioned conjugate gradient on (D - A) x = b_community.
 *
 * Stops when the true relative residual ||(D - A) x - b|| / ||b|| is at
 * most `tol`. On hitting `max_iter` the best iterate seen is returned with
 * converged = false. Holds no state between calls, so concurrent solves of
 * different communities are safe.
 */
inline std::pair<std::vector<double>, SolveReport> solve_iterative(const AbsorbingSystem& sys, std::size_t community,
                                                                   double tol = default_tolerance,
                                                                   std::size_t max_iter = 0) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    if (max_iter == 0) {
        max_iter = default_max_iterations(sys.dim);
    }
    const auto b = sys.rhs_column(community);
    const std::size_t n = sys.dim;
    std::vector<double> x(n, 0.0);
    SolveReport report;

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        report.converged = true;
        return {std::move(x), report};
    }

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), q(n);
    std::vector<double> best = x;
    double best_residual = 1.0;

    auto precondition = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / sys.diag[i];
        }
    };
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += a[i] * c[i];
        }
        return acc;
    };

    precondition();
    p = z;
    double rz = dot(r, z);
    std::size_t it = 0;
    while (it < max_iter) {
        sys.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            break;
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        ++it;

        if (norm2(r) <= tol * bnorm) {
            // Recurrence says converged; confirm against the true residual and
            // restart from it if rounding has drifted.
            sys.multiply(x, q);
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = b[i] - q[i];
            }
            const double true_residual = norm2(r) / bnorm;
            if (true_residual < best_residual) {
                best_residual = true_residual;
                best = x;
            }
            if (true_residual <= tol) {
                break;
            }
            precondition();
            p = z;
            rz = dot(r, z);
            continue;
        }

        precondition();
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }

    const double final_residual = relative_residual(sys, x, b);
    if (final_residual <= best_residual) {
        best_residual = final_residual;
        best = std::move(x);
    }
    report.iterations = it;
    report.relative_residual = best_residual;
    report.converged = best_residual <= tol;
    return {std::move(best), report};
}

}

#endif
