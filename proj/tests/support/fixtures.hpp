#pragma once

// Shared test fixtures: the four-class worked example with injected edge
// weights, and seeded random geographic instances.

#include "prefclust/engine.hpp"
#include "prefclust/tree.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace prefclust::testing {

/// Classes A={A1,A2}, B={B1,B2}, C={C1}, D={D1}. Coordinates are arbitrary;
/// FixtureMetric ignores them.
inline PreferenceTree worked_example_tree() {
    PreferenceTree t;
    const auto a = t.add_class("A");
    const auto b = t.add_class("B");
    const auto c = t.add_class("C");
    const auto d = t.add_class("D");
    t.add_node(a, "A1", GeoPoint::make(0.00, 0.00));
    t.add_node(a, "A2", GeoPoint::make(0.01, 0.03));
    t.add_node(b, "B1", GeoPoint::make(0.04, 0.00));
    t.add_node(b, "B2", GeoPoint::make(0.02, 0.05));
    t.add_node(c, "C1", GeoPoint::make(0.00, 0.06));
    t.add_node(d, "D1", GeoPoint::make(0.03, 0.07));
    return t;
}

/// Edge weights of the worked example. A1/A2 edges and the step totals
/// (C step 13, D step 15) are given; B2-C1, B2-D1, C1-D1 are solved from
/// those totals; B1-C1 and B1-D1 are never consumed.
class FixtureMetric {
public:
    FixtureMetric() {
        set("A1", "B1", 6);
        set("A1", "B2", 8);
        set("A1", "C1", 12);
        set("A1", "D1", 13);
        set("A2", "B1", 9);
        set("A2", "B2", 7);
        set("A2", "C1", 6);
        set("A2", "D1", 5);
        set("B2", "C1", 7);
        set("B2", "D1", 6);
        set("C1", "D1", 4);
        set("B1", "C1", 20);
        set("B1", "D1", 20);
    }

    double operator()(const Node &a, const Node &b) const {
        if (a.name == b.name) return 0.0;
        const auto it = edges_.find(key(a.name, b.name));
        if (it == edges_.end()) throw std::logic_error("no edge " + a.name + "-" + b.name);
        return it->second * scale_;
    }

    FixtureMetric scaled(double c) const {
        FixtureMetric m = *this;
        m.scale_ = c;
        return m;
    }

private:
    static std::pair<std::string, std::string> key(const std::string &a, const std::string &b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }
    void set(const std::string &a, const std::string &b, double d) { edges_[key(a, b)] = d; }

    std::map<std::pair<std::string, std::string>, double> edges_;
    double scale_ = 1.0;
};

/// Haversine multiplied by a constant.
struct ScaledHaversine {
    double factor = 1.0;
    double operator()(const Node &a, const Node &b) const {
        return factor * haversine_km(a.point, b.point).value();
    }
};

/// A point within `radius_km` of `center`, uniform over the disc.
inline GeoPoint random_point_in_disc(std::mt19937_64 &rng, GeoPoint center, double radius_km) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius_km * std::sqrt(u(rng));
    const double theta = 2.0 * 3.14159265358979323846 * u(rng);
    const double km_per_deg = kEarthRadiusKm * 3.14159265358979323846 / 180.0;
    const double dlat = r * std::cos(theta) / km_per_deg;
    const double dlon = r * std::sin(theta) / (km_per_deg * std::cos(deg_to_rad(center.lat())));
    return GeoPoint::make(center.lat() + dlat, center.lon() + dlon);
}

struct RandomTreeOptions {
    std::size_t max_classes = 6;
    std::size_t max_nodes = 8;
    double radius_km = 10.0;
    bool allow_empty_classes = false;
};

/// Seeded random classed instance around a random city-like center.
inline PreferenceTree random_geo_tree(std::mt19937_64 &rng, const RandomTreeOptions &opt = {}) {
    std::uniform_real_distribution<double> lat(-60.0, 60.0);
    std::uniform_real_distribution<double> lon(-170.0, 170.0);
    std::uniform_int_distribution<std::size_t> n_classes(1, opt.max_classes);
    std::uniform_int_distribution<std::size_t> n_nodes(opt.allow_empty_classes ? 0 : 1, opt.max_nodes);
    const GeoPoint center = GeoPoint::make(lat(rng), lon(rng));

    PreferenceTree t;
    const auto k = n_classes(rng);
    for (std::size_t c = 0; c < k; ++c) {
        const auto id = t.add_class("class" + std::to_string(c));
        const auto n = n_nodes(rng);
        for (std::size_t i = 0; i < n; ++i)
            t.add_node(id, "c" + std::to_string(c) + "n" + std::to_string(i),
                       random_point_in_disc(rng, center, opt.radius_km));
    }
    if (t.non_empty_classes().empty()) t.add_node(0, "c0n0", center);
    return t;
}

inline bool rel_close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace prefclust::testing
