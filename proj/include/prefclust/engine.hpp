#pragma once

#include "prefclust/errors.hpp"
#include "prefclust/geo.hpp"
#include "prefclust/hull.hpp"
#include "prefclust/tree.hpp"

#include <cassert>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace prefclust {

/// A symmetric, non-negative distance between nodes of different classes.
/// Distances between nodes of the same class are never requested.
template <class F>
concept DistanceFunction = std::invocable<const F &, const Node &, const Node &> &&
    std::convertible_to<std::invoke_result_t<const F &, const Node &, const Node &>, double>;

/// Great-circle distance between node coordinates.
struct HaversineMetric {
    Kilometers operator()(const Node &a, const Node &b) const { return haversine_km(a.point, b.point); }
};

/// One step of the greedy selection.
///   D: score of the chosen node.
///   T: sum of the scores of every candidate of the class.
///   k: T / D, absent when D == 0.
struct MatrixRow {
    std::size_t step = 0;
    Node node;
    std::string class_name;
    std::vector<std::string> s_snapshot;
    double D = 0.0;
    double T = 0.0;
    std::optional<double> k;
};

struct ClusterResult {
    std::vector<Node> selected;
    std::vector<MatrixRow> matrix;
    std::vector<std::string> skipped_classes;
    std::optional<std::vector<GeoPoint>> hull;
    std::size_t distance_evals = 0;
};

struct CandidateScore {
    Node node;
    double score = 0.0;
};

namespace detail {

template <DistanceFunction Metric>
class CountingMetric {
public:
    CountingMetric(const Metric &m, std::size_t &count) : metric_(m), count_(count) {}

    double operator()(const Node &a, const Node &b) const {
        ++count_;
        return static_cast<double>(std::invoke(metric_, a, b));
    }

private:
    const Metric &metric_;
    std::size_t &count_;
};

inline std::optional<std::size_t> first_non_empty(const PreferenceTree &tree) {
    for (std::size_t i = 0; i < tree.size(); ++i)
        if (!tree[i].empty()) return i;
    return std::nullopt;
}

// Spot-checks symmetry and zero-on-identity over a fixed sample of
// cross-class pairs. Compiled out with NDEBUG.
template <DistanceFunction Metric>
void check_metric([[maybe_unused]] const PreferenceTree &tree, [[maybe_unused]] const Metric &metric) {
#ifndef NDEBUG
    const auto classes = tree.non_empty_classes();
    if (classes.size() < 2) return;
    std::minstd_rand rng(0x5eed);
    for (int trial = 0; trial < 8; ++trial) {
        const auto ci = classes[rng() % classes.size()];
        auto cj = classes[rng() % classes.size()];
        if (ci == cj) cj = classes[(ci == classes.front()) ? 1 : 0];
        const Node &a = tree[ci].nodes[rng() % tree[ci].nodes.size()];
        const Node &b = tree[cj].nodes[rng() % tree[cj].nodes.size()];
        const double ab = static_cast<double>(std::invoke(metric, a, b));
        const double ba = static_cast<double>(std::invoke(metric, b, a));
        const double aa = static_cast<double>(std::invoke(metric, a, a));
        assert(ab >= 0.0 && "distance must be non-negative");
        assert(std::abs(ab - ba) <= 1e-9 * std::max(1.0, std::abs(ab)) && "distance must be symmetric");
        assert(std::abs(aa) <= 1e-9 && "distance to self must be zero");
    }
#endif
}

template <class Counting>
std::vector<CandidateScore> score_candidates(const PreferenceTree &tree, std::size_t class_index,
                                             std::span<const Node> selected, bool first_rule,
                                             const Counting &dist) {
    const auto &candidates = tree[class_index].nodes;
    std::vector<CandidateScore> out;
    out.reserve(candidates.size());
    for (const auto &cand : candidates) {
        double score = 0.0;
        if (first_rule) {
            for (std::size_t c = 0; c < tree.size(); ++c) {
                if (c == class_index) continue;
                for (const auto &other : tree[c].nodes) score += dist(cand, other);
            }
        } else {
            for (const auto &s : selected) score += dist(cand, s);
        }
        out.push_back(CandidateScore{cand, score});
    }
    return out;
}

} // namespace detail

/// Scores every candidate of `class_index`.
///
/// With nothing selected yet and `class_index` being the first non-empty
/// class, a candidate scores the sum of its distances to every node of every
/// other class. Otherwise it scores the sum of its distances to the nodes in
/// `selected_so_far`. Output order is the class's node order.
template <DistanceFunction Metric>
std::vector<CandidateScore> candidate_scores(const PreferenceTree &tree, std::size_t class_index,
                                             std::span<const Node> selected_so_far,
                                             const Metric &metric) {
    if (class_index >= tree.size()) throw ValidationError("class_index", "out of range");
    if (tree[class_index].empty()) throw EmptyClass(tree[class_index].name);
    const bool first_rule = selected_so_far.empty() && detail::first_non_empty(tree) == class_index;
    std::size_t evals = 0;
    return detail::score_candidates(tree, class_index, selected_so_far, first_rule,
                                    detail::CountingMetric<Metric>(metric, evals));
}

/// Greedy one-node-per-class selection.
///
/// Classes are visited in tree order; empty classes are skipped and reported.
/// At each step the lowest-scoring candidate joins the selection, ties going
/// to the lowest node index. Cost is n1*(n - n1) + sum_i n_i*(i - 1) metric
/// evaluations, see predicted_distance_evals().
template <DistanceFunction Metric>
ClusterResult jjcluster(const PreferenceTree &tree, const Metric &metric) {
    const auto first = detail::first_non_empty(tree);
    if (!first) throw EmptyTree();
    detail::check_metric(tree, metric);

    ClusterResult result;
    const detail::CountingMetric<Metric> dist(metric, result.distance_evals);
    std::vector<std::string> snapshot;

    for (std::size_t ci = 0; ci < tree.size(); ++ci) {
        const auto &cls = tree[ci];
        if (cls.empty()) {
            result.skipped_classes.push_back(cls.name);
            continue;
        }
        const bool first_rule = (ci == *first);
        const auto scores = detail::score_candidates(tree, ci, result.selected, first_rule, dist);

        std::size_t best = 0;
        double total = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            total += scores[i].score;
            if (scores[i].score < scores[best].score) best = i;
        }

        snapshot.push_back(cls.name);
        MatrixRow row;
        row.step = result.matrix.size() + 1;
        row.node = scores[best].node;
        row.class_name = cls.name;
        row.s_snapshot = snapshot;
        row.D = scores[best].score;
        row.T = total;
        if (row.D > 0.0) row.k = row.T / row.D;

        result.selected.push_back(row.node);
        result.matrix.push_back(std::move(row));
    }

    std::vector<GeoPoint> pts;
    pts.reserve(result.selected.size());
    for (const auto &n : result.selected) pts.push_back(n.point);
    result.hull = boundary_hull(pts);
    return result;
}

inline ClusterResult jjcluster(const PreferenceTree &tree) { return jjcluster(tree, HaversineMetric{}); }

/// The per-step rows of a finished run, in selection order.
inline std::vector<MatrixRow> optimization_matrix(const ClusterResult &result) { return result.matrix; }

/// Exact number of metric evaluations jjcluster performs for the given
/// non-empty class sizes (in class order).
inline std::size_t predicted_distance_evals(std::span<const std::size_t> class_sizes) {
    if (class_sizes.empty()) return 0;
    std::size_t n = 0;
    for (auto s : class_sizes) n += s;
    std::size_t count = class_sizes[0] * (n - class_sizes[0]);
    for (std::size_t i = 1; i < class_sizes.size(); ++i) count += class_sizes[i] * i;
    return count;
}

} // namespace prefclust
