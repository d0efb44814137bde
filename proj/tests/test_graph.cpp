#include <gtest/gtest.h>

#include <sstream>

#include "seedcd/graph.hpp"
#include "support.hpp"

using namespace seedcd;
using seedcd::test::graph_from_text;

TEST(Graph, LoadsPath) {
    Graph g = graph_from_text("0 1\n1 2\n");
    EXPECT_EQ(g.num_nodes(), 3u);
    EXPECT_EQ(g.num_edges(), 2u);
    EXPECT_EQ(g.degree(0), 1u);
    EXPECT_EQ(g.degree(1), 2u);
    EXPECT_EQ(g.degree(2), 1u);
}

TEST(Graph, CollapsesDuplicateEdges) {
    std::istringstream in("a b\nb a\n");
    LoadReport report;
    Graph g = load_edge_list(in, &report);
    EXPECT_EQ(g.num_nodes(), 2u);
    EXPECT_EQ(g.num_edges(), 1u);
    EXPECT_EQ(report.duplicate_edges, 1u);
}

TEST(Graph, RejectsSelfLoop) {
    try {
        graph_from_text("x x\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
    }
}

TEST(Graph, ReportsMalformedLineNumber) {
    try {
        graph_from_text("# header\n0 1\n2\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(graph_from_text("0 1 2\n"), ParseError);
}

TEST(Graph, RejectsEmptyInput) {
    EXPECT_THROW(graph_from_text(""), ParseError);
    EXPECT_THROW(graph_from_text("# only a comment\n\n"), ParseError);
}

TEST(Graph, SkipsCommentsAndKeepsLabels) {
    Graph g = graph_from_text("# comment\nalice bob\n\nbob carol # trailing\n");
    EXPECT_EQ(g.num_nodes(), 3u);
    EXPECT_EQ(g.label(0), "alice");
    EXPECT_EQ(*g.find("carol"), 2u);
    EXPECT_FALSE(g.find("dave").has_value());
}

TEST(Graph, Degree) {
    Graph k4 = graph_from_text("0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    for (NodeId v = 0; v < 4; ++v) {
        EXPECT_EQ(k4.degree(v), 3u);
    }
    EXPECT_THROW(k4.degree(4), std::out_of_range);
}

TEST(Graph, FromEdgesRejectsSelfLoopAndRange) {
    std::vector<Edge> loop{{0, 0}};
    EXPECT_THROW(Graph::from_edges(1, loop), std::invalid_argument);
    std::vector<Edge> far{{0, 5}};
    EXPECT_THROW(Graph::from_edges(2, far), std::out_of_range);
}

TEST(Graph, ReachabilityConnected) {
    Graph g = seedcd::test::path_graph(5);
    std::vector<NodeId> seeds{3};
    EXPECT_TRUE(check_seed_reachability(g, seeds).empty());
}

TEST(Graph, ReachabilityTwoComponents) {
    Graph g = graph_from_text("0 1\n1 2\n3 4\n4 5\n");
    std::vector<NodeId> seeds{0};
    EXPECT_EQ(check_seed_reachability(g, seeds), (std::vector<NodeId>{3, 4, 5}));
}

TEST(Graph, ReachabilityIsolatedNode) {
    std::vector<Edge> edges{{0, 1}, {1, 2}};
    Graph g = Graph::from_edges(4, edges);
    std::vector<NodeId> seeds{0};
    EXPECT_EQ(check_seed_reachability(g, seeds), (std::vector<NodeId>{3}));
}

TEST(Graph, ReachabilityRequiresSeeds) {
    Graph g = seedcd::test::path_graph(1);
    EXPECT_THROW(check_seed_reachability(g, {}), std::invalid_argument);
}

TEST(Graph, InducedSubgraphKeepsLabels) {
    Graph g = graph_from_text("a b\nb c\nc d\n");
    std::vector<char> keep{1, 1, 0, 1};
    std::vector<NodeId> old_ids;
    Graph sub = induced_subgraph(g, keep, old_ids);
    EXPECT_EQ(sub.num_nodes(), 3u);
    EXPECT_EQ(sub.num_edges(), 1u);
    EXPECT_EQ(sub.label(2), "d");
    EXPECT_EQ(old_ids, (std::vector<NodeId>{0, 1, 3}));
}

// Property: random edge lists load into graphs that satisfy symmetry and
// the degree-sum identity, and survive a write/reload round trip.
TEST(GraphProperty, InvariantsAndRoundTrip) {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(60);
        std::ostringstream text;
        const std::size_t lines = 1 + rng.below(200);
        for (std::size_t e = 0; e < lines; ++e) {
            auto a = rng.below(n), b = rng.below(n);
            if (a == b) {
                b = (a + 1) % n;
            }
            text << "n" << a << " n" << b << "\n";
        }
        Graph g = graph_from_text(text.str());

        std::size_t degree_sum = 0;
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
            auto nb = g.neighbors(v);
            degree_sum += nb.size();
            for (std::size_t i = 0; i < nb.size(); ++i) {
                ASSERT_NE(nb[i], v);
                if (i > 0) {
                    ASSERT_LT(nb[i - 1], nb[i]);
                }
                ASSERT_TRUE(g.has_edge(nb[i], v));
            }
        }
        ASSERT_EQ(degree_sum, 2 * g.num_edges());

        std::ostringstream written;
        write_edge_list(written, g);
        Graph again = graph_from_text(written.str());
        ASSERT_EQ(again.num_nodes(), g.num_nodes());
        ASSERT_EQ(again.num_edges(), g.num_edges());
        for (const auto& [u, v] : g.edges()) {
            ASSERT_TRUE(again.has_edge(*again.find(g.label(u)), *again.find(g.label(v))));
        }
    }
}
