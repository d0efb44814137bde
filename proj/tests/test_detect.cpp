#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "seedcd/detect.hpp"
#include "seedcd/walker.hpp"
#include "support.hpp"

using namespace seedcd;
using seedcd::test::graph_from_text;

namespace {

Graph random_graph(Rng& rng, std::size_t n) { return seedcd::test::random_connected_graph(n, 2 * n, rng); }

SeedSet random_seeds(Rng& rng, std::size_t n, std::size_t k, std::size_t l) {
    SeedSet seeds(l);
    for (NodeId s : seedcd::test::random_subset(n, k, rng)) {
        std::vector<double> row(l);
        for (double& a : row) {
            a = rng.uniform();
        }
        seeds.set(s, row);
    }
    return seeds;
}

}

TEST(DetectSingle, GamblersRuin) {
    Graph g = graph_from_text("s1 a\na b\nb c\nc s2\n");
    SeedSet seeds(1);
    seeds.set(*g.find("s1"), {1.0});
    seeds.set(*g.find("s2"), {0.0});
    for (SolverMode mode : {SolverMode::iterative, SolverMode::direct}) {
        DetectOptions opts;
        opts.mode = mode;
        AffinityMatrix aff = detect_single(g, seeds, opts);
        ASSERT_EQ(aff.rows(), 3u);
        EXPECT_NEAR(aff(0, 0), 0.75, 1e-8);
        EXPECT_NEAR(aff(1, 0), 0.50, 1e-8);
        EXPECT_NEAR(aff(2, 0), 0.25, 1e-8);
    }
}

TEST(DetectSingle, AllOnes) {
    Rng rng(1);
    Graph g = random_graph(rng, 50);
    SeedSet seeds(1);
    for (NodeId s : seedcd::test::random_subset(50, 8, rng)) {
        seeds.set(s, {1.0});
    }
    AffinityMatrix aff = detect_single(g, seeds);
    for (std::size_t r = 0; r < aff.rows(); ++r) {
        EXPECT_NEAR(aff(r, 0), 1.0, 1e-6);
    }
}

TEST(DetectSingle, FigureExample) {
    Graph g = seedcd::test::load_fixture("figure_example.edges");
    SeedSet seeds(1);
    seeds.set(*g.find("s1"), {1.0});
    seeds.set(*g.find("s2"), {0.0});
    AffinityMatrix aff = detect_single(g, seeds);
    const auto v = *g.find("v");
    auto it = std::find(aff.nodes.begin(), aff.nodes.end(), v);
    EXPECT_NEAR(aff(static_cast<std::size_t>(it - aff.nodes.begin()), 0), 1.0 / 3.0, 1e-9);
}

TEST(DetectSingle, Errors) {
    Graph g = graph_from_text("s a\nx y\n");
    SeedSet seeds(1);
    seeds.set(*g.find("s"), {1.0});
    EXPECT_THROW(detect_single(g, seeds), ReachabilityError);
    SeedSet two(2);
    EXPECT_THROW(detect_single(g, two), std::invalid_argument);
}

TEST(DetectMulti, FigureExample) {
    Graph g = seedcd::test::load_fixture("figure_example.edges");
    SeedSet seeds = seedcd::test::load_seed_fixture("figure_example.seeds", g);
    AffinityMatrix aff = detect_multi(g, seeds);
    const auto v = *g.find("v");
    const auto row = static_cast<std::size_t>(std::find(aff.nodes.begin(), aff.nodes.end(), v) - aff.nodes.begin());
    EXPECT_NEAR(aff(row, 0), 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(aff(row, 1), 2.0 / 3.0, 1e-9);

    auto crisp = assign_crisp(aff);
    EXPECT_EQ(crisp[row].node, v);
    EXPECT_EQ(crisp[row].community, 1u);
}

TEST(DetectMulti, ZeroColumnStaysZero) {
    Rng rng(2);
    Graph g = random_graph(rng, 60);
    SeedSet seeds(2);
    for (NodeId s : seedcd::test::random_subset(60, 10, rng)) {
        seeds.set(s, {rng.uniform(), 0.0});
    }
    AffinityMatrix aff = detect_multi(g, seeds);
    for (std::size_t r = 0; r < aff.rows(); ++r) {
        EXPECT_EQ(aff(r, 1), 0.0);
    }
    EXPECT_EQ(aff.reports[1].iterations, 0u);
}

TEST(DetectMulti, ColumnsMatchSingleRuns) {
    Rng rng(3);
    Graph g = random_graph(rng, 80);
    SeedSet seeds = random_seeds(rng, 80, 12, 3);
    AffinityMatrix multi = detect_multi(g, seeds);
    for (std::size_t c = 0; c < 3; ++c) {
        SeedSet one(1);
        for (const auto& [node, row] : seeds.rows()) {
            one.set(node, {row[c]});
        }
        AffinityMatrix single = detect_single(g, one);
        for (std::size_t r = 0; r < multi.rows(); ++r) {
            EXPECT_NEAR(multi(r, c), single(r, 0), 1e-12);
        }
    }
}

TEST(DetectMulti, ParallelSolvesMatchSerial) {
    Rng rng(4);
    Graph g = random_graph(rng, 120);
    SeedSet seeds = random_seeds(rng, 120, 15, 6);
    DetectOptions serial, parallel;
    parallel.jobs = 4;
    EXPECT_EQ(detect_multi(g, seeds, serial).values, detect_multi(g, seeds, parallel).values);
}

TEST(DetectMulti, NonConvergenceThrows) {
    Graph g = seedcd::test::path_graph(100);
    SeedSet seeds(1);
    seeds.set(0, {1.0});
    seeds.set(101, {0.0});
    DetectOptions opts;
    opts.max_iterations = 2;
    EXPECT_THROW(detect_multi(g, seeds, opts), SolverError);
}

TEST(DetectMulti, AllSeeds) {
    Graph g = seedcd::test::path_graph(1);
    SeedSet seeds(2);
    seeds.set_indicator(0, 0);
    seeds.set_indicator(1, 1);
    seeds.set_indicator(2, 1);
    AffinityMatrix aff = detect_multi(g, seeds);
    EXPECT_EQ(aff.rows(), 0u);
    auto membership = crisp_membership(aff, seeds, 3);
    EXPECT_EQ(membership, (std::vector<std::size_t>{0, 1, 1}));
}

TEST(AssignCrisp, TiesAndSingleCommunity) {
    AffinityMatrix aff;
    aff.nodes = {3, 5, 7};
    aff.communities = 2;
    aff.values = {1.0 / 3.0, 2.0 / 3.0, 0.5, 0.5, 0.9, 0.1};
    auto crisp = assign_crisp(aff);
    EXPECT_EQ(crisp[0].community, 1u);
    EXPECT_EQ(crisp[1].community, 0u);
    EXPECT_EQ(crisp[2].community, 0u);

    AffinityMatrix single;
    single.nodes = {0, 1};
    single.communities = 1;
    single.values = {0.2, 0.9};
    for (const auto& e : assign_crisp(single)) {
        EXPECT_EQ(e.community, 0u);
    }
}

TEST(Output, AffinityCsvFormat) {
    Graph g = seedcd::test::load_fixture("figure_example.edges");
    SeedSet seeds = seedcd::test::load_seed_fixture("figure_example.seeds", g);
    AffinityMatrix aff = detect_multi(g, seeds);
    std::ostringstream out;
    write_affinity_csv(out, g, aff, seeds);
    const std::string csv = out.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "node,c0,c1");
    EXPECT_NE(csv.find("\nv,0.333333333,0.666666667\n"), std::string::npos);
    EXPECT_NE(csv.find("\ns1,1,0\n"), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);

    std::ostringstream crisp;
    write_crisp_csv(crisp, g, crisp_membership(aff, seeds, g.num_nodes()));
    EXPECT_NE(crisp.str().find("\nv,1\n"), std::string::npos);
}

TEST(Output, ClampsAtBoundary) {
    EXPECT_EQ(format_affinity(-1e-12), "0");
    EXPECT_EQ(format_affinity(-0.0), "0");
    EXPECT_EQ(format_affinity(1.0 + 1e-12), "1");
    EXPECT_EQ(format_affinity(0.75), "0.75");
}

// Conservation: seed rows summing to c give output rows summing to c.
TEST(DetectProperty, Conservation) {
    Rng rng(10);
    for (double c : {0.5, 1.0, 2.0}) {
        for (int trial = 0; trial < 5; ++trial) {
            const std::size_t n = 20 + rng.below(150);
            Graph g = random_graph(rng, n);
            const std::size_t l = 3;
            SeedSet seeds(l);
            for (NodeId s : seedcd::test::random_subset(n, 2 + rng.below(n / 5), rng)) {
                // c/l plus a zero-sum perturbation small enough to stay in [0,1].
                const double mid = c / static_cast<double>(l);
                const double room = 0.9 * std::min(mid, 1.0 - mid);
                std::vector<double> d(l);
                double mean = 0.0;
                for (double& x : d) {
                    x = 2.0 * rng.uniform() - 1.0;
                    mean += x / static_cast<double>(l);
                }
                double peak = 1e-12;
                for (double& x : d) {
                    x -= mean;
                    peak = std::max(peak, std::abs(x));
                }
                std::vector<double> row(l);
                for (std::size_t i = 0; i < l; ++i) {
                    row[i] = mid + room * d[i] / peak;
                }
                seeds.set(s, row);
            }
            AffinityMatrix aff = detect_multi(g, seeds);
            for (std::size_t r = 0; r < aff.rows(); ++r) {
                double sum = 0.0;
                for (double a : aff.row(r)) {
                    sum += a;
                }
                ASSERT_NEAR(sum, c, 1e-6);
            }
        }
    }
}

// The map from seed affinities to output affinities is linear.
TEST(DetectProperty, Linearity) {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 20 + rng.below(100);
        Graph g = random_graph(rng, n);
        const auto ids = seedcd::test::random_subset(n, 3 + rng.below(8), rng);
        const double alpha = 0.5 * rng.uniform(), gamma = 0.5 * rng.uniform();
        SeedSet first(2), second(2), mixed(2);
        for (NodeId s : ids) {
            std::vector<double> a{rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform()};
            first.set(s, a);
            second.set(s, b);
            mixed.set(s, {alpha * a[0] + gamma * b[0], alpha * a[1] + gamma * b[1]});
        }
        auto x = detect_multi(g, first), y = detect_multi(g, second), z = detect_multi(g, mixed);
        for (std::size_t i = 0; i < z.values.size(); ++i) {
            ASSERT_NEAR(z.values[i], alpha * x.values[i] + gamma * y.values[i], 1e-6);
        }
    }
}

// Range and argmax invariance under a common positive scale.
TEST(DetectProperty, RangeAndScaleInvariantArgmax) {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 30 + rng.below(100);
        Graph g = random_graph(rng, n);
        SeedSet seeds = random_seeds(rng, n, 4 + rng.below(10), 4);
        SeedSet scaled(4);
        for (const auto& [node, row] : seeds.rows()) {
            std::vector<double> r = row;
            for (double& a : r) {
                a *= 0.37;
            }
            scaled.set(node, r);
        }
        auto aff = detect_multi(g, seeds);
        for (double v : aff.values) {
            ASSERT_GE(v, -1e-8);
            ASSERT_LE(v, 1.0 + 1e-8);
        }
        auto a = assign_crisp(aff);
        auto b = assign_crisp(detect_multi(g, scaled));
        for (std::size_t i = 0; i < a.size(); ++i) {
            // Exact ties may split under rounding; only compare clear winners.
            auto row = aff.row(i);
            std::vector<double> sorted(row.begin(), row.end());
            std::sort(sorted.rbegin(), sorted.rend());
            if (sorted[0] - sorted[1] > 1e-9) {
                ASSERT_EQ(a[i].community, b[i].community);
            }
        }
    }
}

// Solver output agrees with walk simulation per node and community.
TEST(DetectProperty, WalkerAgreement) {
    Rng rng(14);
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t n = 50 + rng.below(400);
        Graph g = random_graph(rng, n);
        SeedSet seeds = random_seeds(rng, n, 5 + rng.below(20), 2);
        auto aff = detect_multi(g, seeds);
        auto ids = seeds.nodes();
        AbsorbingChain chain = build_chain(g, ids);
        for (int k = 0; k < 3; ++k) {
            const std::size_t r = rng.below(aff.rows());
            WalkStats stats = run_walks(chain, aff.nodes[r], 100000, 1000 + k);
            for (std::size_t c = 0; c < 2; ++c) {
                ASSERT_NEAR(estimate_affinity(stats, chain, seeds, c), aff(r, c), 0.01);
            }
        }
    }
}
