#pragma once

#include "prefclust/errors.hpp"

#include <cmath>
#include <numbers>

namespace prefclust {

/// Mean Earth radius used by every distance in the library.
inline constexpr double kEarthRadiusKm = 6371.0;

/// Latitude/longitude in degrees. Only constructible through `make`, which
/// rejects out-of-range values instead of clamping them.
class GeoPoint {
public:
    static GeoPoint make(double lat, double lon) {
        if (!(lat >= -90.0 && lat <= 90.0)) throw OutOfRange("lat", lat);
        if (!(lon >= -180.0 && lon <= 180.0)) throw OutOfRange("lon", lon);
        return GeoPoint(lat, lon);
    }

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }

    friend bool operator==(const GeoPoint &, const GeoPoint &) = default;

private:
    GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {}

    double lat_;
    double lon_;
};

inline GeoPoint validate_point(double lat, double lon) { return GeoPoint::make(lat, lon); }

/// Non-negative great-circle distance, at most half the circumference.
class Kilometers {
public:
    constexpr Kilometers() = default;
    constexpr explicit Kilometers(double v) : value_(v) {}

    constexpr double value() const noexcept { return value_; }
    constexpr operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

inline constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }

/// Haversine great-circle distance on a sphere of radius kEarthRadiusKm.
/// Symmetric bit-for-bit: both terms of the sum are order-independent.
inline Kilometers haversine_km(const GeoPoint &a, const GeoPoint &b) {
    const double phi1 = deg_to_rad(a.lat());
    const double phi2 = deg_to_rad(b.lat());
    const double sdphi = std::sin((phi2 - phi1) / 2.0);
    const double sdlambda = std::sin(deg_to_rad(b.lon() - a.lon()) / 2.0);
    double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlambda * sdlambda;
    if (h > 1.0) h = 1.0;
    return Kilometers(2.0 * kEarthRadiusKm * std::asin(std::sqrt(h)));
}

} // namespace prefclust
