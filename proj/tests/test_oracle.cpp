#include <gtest/gtest.h>

#include "prefclust/engine.hpp"
#include "prefclust/oracle.hpp"
#include "support/fixtures.hpp"

#include <random>

using namespace prefclust;
using namespace prefclust::testing;

TEST(GreedyReference, WorkedExample) {
    const auto r = oracle::greedy_reference(worked_example_tree(), FixtureMetric{});
    ASSERT_EQ(r.selected.size(), 4u);
    EXPECT_EQ(r.selected[0].name, "A2");
    EXPECT_EQ(r.selected[1].name, "B2");
    EXPECT_EQ(r.selected[2].name, "C1");
    EXPECT_EQ(r.selected[3].name, "D1");
    EXPECT_EQ(r.matrix[0].D, 27);
    EXPECT_EQ(r.matrix[3].D, 15);
}

TEST(GreedyReference, MatchesEngineOnRandomInstances) {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 200; ++i) {
        const auto tree = random_geo_tree(rng, {6, 8, 10.0, true});
        const auto a = jjcluster(tree);
        const auto b = oracle::greedy_reference(tree, HaversineMetric{});
        ASSERT_EQ(a.selected, b.selected);
        ASSERT_EQ(a.skipped_classes, b.skipped_classes);
        ASSERT_EQ(a.distance_evals, b.distance_evals);
        for (std::size_t s = 0; s < a.matrix.size(); ++s) {
            ASSERT_TRUE(rel_close(a.matrix[s].D, b.matrix[s].D, 1e-9));
            ASSERT_TRUE(rel_close(a.matrix[s].T, b.matrix[s].T, 1e-9));
            ASSERT_EQ(a.matrix[s].s_snapshot, b.matrix[s].s_snapshot);
        }
    }
}

TEST(GreedyReference, SingleNodePerClassSelectsEverything) {
    PreferenceTree t;
    for (int c = 0; c < 4; ++c)
        t.add_node(t.add_class("k" + std::to_string(c)), "n" + std::to_string(c), GeoPoint::make(c, c * 2));
    const auto r = oracle::greedy_reference(t, HaversineMetric{});
    ASSERT_EQ(r.selected.size(), 4u);
    for (int c = 0; c < 4; ++c) EXPECT_EQ(r.selected[c].name, "n" + std::to_string(c));
}

TEST(PairwiseObjective, FixtureSums) {
    const auto t = worked_example_tree();
    const FixtureMetric m;
    EXPECT_EQ(oracle::pairwise_objective({t[0].nodes[1], t[1].nodes[1]}, m), 7);
    EXPECT_EQ(oracle::pairwise_objective({t[0].nodes[1]}, m), 0);
    EXPECT_EQ(oracle::pairwise_objective({t[0].nodes[1], t[1].nodes[1], t[2].nodes[0]}, m), 20);
}

TEST(ExhaustiveMinPairwise, WorkedExample) {
    // Four combinations: A1B1 75, A1B2 50, A2B1 64, A2B2 35 (C1, D1 forced).
    const auto t = worked_example_tree();
    const FixtureMetric m;
    const auto best = oracle::exhaustive_min_pairwise(t, m);
    EXPECT_EQ(best.objective, 35);
    EXPECT_EQ(best.selection[0].name, "A2");
    EXPECT_EQ(best.selection[1].name, "B2");
    const auto greedy = jjcluster(t, m);
    EXPECT_LE(best.objective, oracle::pairwise_objective(greedy.selected, m));
}

TEST(ExhaustiveMinPairwise, SingleCombination) {
    PreferenceTree t;
    t.add_node(t.add_class("a"), "x", GeoPoint::make(1, 1));
    t.add_node(t.add_class("b"), "y", GeoPoint::make(1, 2));
    const auto best = oracle::exhaustive_min_pairwise(t, HaversineMetric{});
    ASSERT_EQ(best.selection.size(), 2u);
    EXPECT_EQ(best.selection[0].name, "x");
    EXPECT_EQ(best.selection[1].name, "y");
}

TEST(ExhaustiveMinPairwise, GuardsProductBound) {
    PreferenceTree t;
    for (int c = 0; c < 7; ++c) {
        const auto id = t.add_class("c" + std::to_string(c));
        for (int n = 0; n < 10; ++n) t.add_node(id, "n" + std::to_string(n), GeoPoint::make(n, c));
    }
    EXPECT_THROW(oracle::exhaustive_min_pairwise(t, HaversineMetric{}), TooLarge);
}

TEST(ExhaustiveMinPairwise, GreedyNeverBeatsOptimum) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        const auto tree = random_geo_tree(rng, {4, 5, 10.0, false});
        const auto greedy = jjcluster(tree);
        const auto best = oracle::exhaustive_min_pairwise(tree, HaversineMetric{});
        const double g = oracle::pairwise_objective(greedy.selected, HaversineMetric{});
        ASSERT_GE(g, best.objective * (1 - 1e-12));
        bool singletons = true;
        for (const auto &c : tree.classes()) singletons &= c.nodes.size() == 1;
        if (singletons) {
            ASSERT_EQ(g, best.objective);
        }
    }
}
