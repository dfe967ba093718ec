#pragma once

#include "prefclust/geo.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

namespace prefclust {

/// Convex boundary of `points`, treating (lon, lat) as planar coordinates.
/// This is only a fair approximation at city scale and away from the
/// antimeridian.
///
/// Returns a closed counter-clockwise ring (first vertex repeated last) with
/// no collinear vertices, or nullopt when fewer than three distinct
/// non-collinear points exist.
inline std::optional<std::vector<GeoPoint>> boundary_hull(std::span<const GeoPoint> points) {
    std::vector<GeoPoint> pts(points.begin(), points.end());
    auto by_x = [](const GeoPoint &a, const GeoPoint &b) {
        return a.lon() < b.lon() || (a.lon() == b.lon() && a.lat() < b.lat());
    };
    std::sort(pts.begin(), pts.end(), by_x);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return std::nullopt;

    auto cross = [](const GeoPoint &o, const GeoPoint &a, const GeoPoint &b) {
        return (a.lon() - o.lon()) * (b.lat() - o.lat()) -
               (a.lat() - o.lat()) * (b.lon() - o.lon());
    };

    // Andrew's monotone chain: lower hull then upper hull.
    std::vector<GeoPoint> hull;
    hull.reserve(2 * pts.size());
    for (const auto &p : pts) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
            hull.pop_back();
        hull.push_back(p);
    }
    const std::size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
            hull.pop_back();
        hull.push_back(*it);
    }
    // hull.back() == hull.front() here, which already closes the ring.
    if (hull.size() < 4) return std::nullopt;
    return hull;
}

} // namespace prefclust
