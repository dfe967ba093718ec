#pragma once

#include "prefclust/errors.hpp"
#include "prefclust/geo.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefclust {

/// One candidate location. `index` is the node's position within its class.
struct Node {
    std::size_t class_id = 0;
    std::size_t index = 0;
    std::string name;
    GeoPoint point = GeoPoint::make(0.0, 0.0);

    friend bool operator==(const Node &, const Node &) = default;
};

struct PreferenceClass {
    std::string name;
    std::vector<Node> nodes;

    bool empty() const noexcept { return nodes.empty(); }
};

inline bool iequals(std::string_view a, std::string_view b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) ==
               std::tolower(static_cast<unsigned char>(y));
    });
}

/// Ordered classes of ordered candidate nodes. Class names are unique
/// ignoring case; node order is exactly insertion order.
class PreferenceTree {
public:
    /// Returns the index of the new class. Throws ValidationError on a
    /// duplicate (case-insensitive) or empty name.
    std::size_t add_class(std::string name) {
        if (name.empty()) throw ValidationError("class", "class name must not be empty");
        if (find_class(name)) throw ValidationError("class", "duplicate class '" + name + "'");
        classes_.push_back(PreferenceClass{std::move(name), {}});
        return classes_.size() - 1;
    }

    const Node &add_node(std::size_t class_id, std::string name, GeoPoint point) {
        if (class_id >= classes_.size()) throw ValidationError("class", "class index out of range");
        if (name.empty()) throw ValidationError("name", "node name must not be empty");
        auto &nodes = classes_[class_id].nodes;
        nodes.push_back(Node{class_id, nodes.size(), std::move(name), point});
        return nodes.back();
    }

    std::optional<std::size_t> find_class(std::string_view name) const {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (iequals(classes_[i].name, name)) return i;
        return std::nullopt;
    }

    const std::vector<PreferenceClass> &classes() const noexcept { return classes_; }
    const PreferenceClass &operator[](std::size_t i) const { return classes_.at(i); }
    std::size_t size() const noexcept { return classes_.size(); }

    std::size_t node_count() const noexcept {
        std::size_t n = 0;
        for (const auto &c : classes_) n += c.nodes.size();
        return n;
    }

    /// Indices of classes with at least one node, in class order.
    std::vector<std::size_t> non_empty_classes() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (!classes_[i].empty()) out.push_back(i);
        return out;
    }

    bool contains(const Node &n) const {
        if (n.class_id >= classes_.size()) return false;
        const auto &nodes = classes_[n.class_id].nodes;
        return n.index < nodes.size() && nodes[n.index] == n;
    }

    friend bool operator==(const PreferenceTree &a, const PreferenceTree &b) {
        if (a.classes_.size() != b.classes_.size()) return false;
        for (std::size_t i = 0; i < a.classes_.size(); ++i) {
            if (a.classes_[i].name != b.classes_[i].name) return false;
            if (a.classes_[i].nodes != b.classes_[i].nodes) return false;
        }
        return true;
    }

private:
    std::vector<PreferenceClass> classes_;
};

} // namespace prefclust
