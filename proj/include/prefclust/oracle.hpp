#pragma once

// Independent reference implementations for tests. Nothing here calls into
// engine.hpp's algorithm; only the result types are shared.

#include "prefclust/engine.hpp"
#include "prefclust/errors.hpp"
#include "prefclust/tree.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace prefclust::oracle {

/// Straight transliteration of the greedy pseudocode: walk full_tree class by
/// class, build distance_list, take the first minimum, append to S.
/// Leaves `hull` unset.
template <DistanceFunction Metric>
ClusterResult greedy_reference(const PreferenceTree &tree, const Metric &metric) {
    ClusterResult out;
    auto harvesine = [&](const Node &x, const Node &y) {
        ++out.distance_evals;
        return static_cast<double>(std::invoke(metric, x, y));
    };

    std::vector<Node> S;
    std::vector<std::string> names_in_s;
    bool first_iteration = true;

    for (const auto &class_list : tree.classes()) {
        if (class_list.nodes.empty()) {
            out.skipped_classes.push_back(class_list.name);
            continue;
        }
        std::vector<double> distance_list;
        const std::string &this_class = class_list.name;
        if (first_iteration) {
            for (const auto &mine : class_list.nodes) {
                double distance = 0.0;
                for (const auto &item : tree.classes()) {
                    const std::string &item_class = item.name;
                    if (item_class == this_class) continue;
                    for (const auto &theirs : item.nodes) distance += harvesine(mine, theirs);
                }
                distance_list.push_back(distance);
            }
            first_iteration = false;
        } else {
            for (const auto &item : class_list.nodes) {
                double distance = 0.0;
                for (const auto &s : S) distance += harvesine(item, s);
                distance_list.push_back(distance);
            }
        }

        const auto min_it = std::min_element(distance_list.begin(), distance_list.end());
        const auto pick = static_cast<std::size_t>(min_it - distance_list.begin());
        double total = 0.0;
        for (double d : distance_list) total += d;

        S.push_back(class_list.nodes[pick]);
        names_in_s.push_back(this_class);

        MatrixRow row;
        row.step = S.size();
        row.node = class_list.nodes[pick];
        row.class_name = this_class;
        row.s_snapshot = names_in_s;
        row.D = *min_it;
        row.T = total;
        if (*min_it != 0.0) row.k = total / *min_it;
        out.matrix.push_back(row);
    }
    if (S.empty()) throw EmptyTree();
    out.selected = S;
    return out;
}

/// Sum of the metric over every unordered pair of `selection`.
template <DistanceFunction Metric>
double pairwise_objective(const std::vector<Node> &selection, const Metric &metric) {
    double sum = 0.0;
    for (std::size_t i = 0; i < selection.size(); ++i)
        for (std::size_t j = i + 1; j < selection.size(); ++j)
            sum += static_cast<double>(std::invoke(metric, selection[i], selection[j]));
    return sum;
}

struct ExhaustiveResult {
    std::vector<Node> selection;
    double objective = 0.0;
};

inline constexpr std::size_t kExhaustiveLimit = 1'000'000;

/// Brute-force minimum of pairwise_objective over every one-node-per-class
/// choice (empty classes ignored). Combinations are visited in lexicographic
/// index order and the first minimum wins.
template <DistanceFunction Metric>
ExhaustiveResult exhaustive_min_pairwise(const PreferenceTree &tree, const Metric &metric) {
    std::vector<const PreferenceClass *> classes;
    std::size_t combos = 1;
    for (const auto &c : tree.classes()) {
        if (c.nodes.empty()) continue;
        classes.push_back(&c);
        if (combos > kExhaustiveLimit / c.nodes.size())
            throw TooLarge("more than " + std::to_string(kExhaustiveLimit) + " combinations");
        combos *= c.nodes.size();
    }
    if (classes.empty()) throw EmptyTree();

    std::vector<std::size_t> odometer(classes.size(), 0);
    std::vector<Node> current(classes.size());
    ExhaustiveResult best;
    bool have_best = false;
    for (std::size_t n = 0; n < combos; ++n) {
        for (std::size_t i = 0; i < classes.size(); ++i) current[i] = classes[i]->nodes[odometer[i]];
        const double value = pairwise_objective(current, metric);
        if (!have_best || value < best.objective) {
            best = ExhaustiveResult{current, value};
            have_best = true;
        }
        for (std::size_t i = classes.size(); i-- > 0;) {
            if (++odometer[i] < classes[i]->nodes.size()) break;
            odometer[i] = 0;
        }
    }
    return best;
}

} // namespace prefclust::oracle
