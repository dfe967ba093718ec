#include <gtest/gtest.h>

#include "prefclust/geo.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace prefclust;

TEST(GeoPoint, AcceptsValidCoordinates) {
    const auto p = validate_point(22.553118, 88.352491);
    EXPECT_DOUBLE_EQ(p.lat(), 22.553118);
    EXPECT_DOUBLE_EQ(p.lon(), 88.352491);
    EXPECT_NO_THROW(validate_point(0, 0));
    EXPECT_NO_THROW(validate_point(-90, 180));
    EXPECT_NO_THROW(validate_point(90, -180));
}

TEST(GeoPoint, RejectsOutOfRangeWithoutClamping) {
    try {
        validate_point(91, 0);
        FAIL() << "expected OutOfRange";
    } catch (const OutOfRange &e) {
        EXPECT_EQ(e.field(), "lat");
        EXPECT_EQ(e.value(), 91);
    }
    try {
        validate_point(0, -180.5);
        FAIL() << "expected OutOfRange";
    } catch (const OutOfRange &e) {
        EXPECT_EQ(e.field(), "lon");
    }
    EXPECT_THROW(validate_point(std::nan(""), 0), OutOfRange);
    EXPECT_THROW(validate_point(0, INFINITY), OutOfRange);
}

TEST(Haversine, Identity) {
    const auto p = validate_point(35.677815, 139.736694);
    EXPECT_EQ(haversine_km(p, p).value(), 0.0);
}

TEST(Haversine, QuarterAndHalfGreatCircle) {
    const auto o = validate_point(0, 0);
    EXPECT_NEAR(haversine_km(o, validate_point(0, 90)).value(), 10007.543398, 10007.543398 * 1e-6);
    EXPECT_NEAR(haversine_km(o, validate_point(0, 180)).value(), 20015.086796, 20015.086796 * 1e-6);
    EXPECT_DOUBLE_EQ(haversine_km(o, validate_point(0, 180)).value(), std::numbers::pi * kEarthRadiusKm);
}

TEST(Haversine, LondonParisMatchesExtendedPrecisionReference) {
    // Spherical law of cosines evaluated at 50 significant digits, R = 6371.0 km.
    constexpr double reference = 342.80653071521827542;
    const double d = haversine_km(validate_point(51.5007, -0.1246), validate_point(48.8566, 2.3522)).value();
    EXPECT_NEAR(d, reference, reference * 1e-9);
}

TEST(Haversine, LongitudeWrap) {
    const double across = haversine_km(validate_point(0, 179.5), validate_point(0, -179.5)).value();
    const double plain = haversine_km(validate_point(0, 0), validate_point(0, 1)).value();
    EXPECT_NEAR(across, plain, plain * 1e-9);
}

class HaversineProperties : public ::testing::Test {
protected:
    GeoPoint random_point() {
        std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
        return validate_point(lat(rng), lon(rng));
    }
    std::mt19937_64 rng{20240601};
};

TEST_F(HaversineProperties, SymmetricAndBounded) {
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_point(), b = random_point();
        const double ab = haversine_km(a, b).value();
        ASSERT_EQ(ab, haversine_km(b, a).value());
        ASSERT_GE(ab, 0.0);
        ASSERT_LE(ab, std::numbers::pi * kEarthRadiusKm);
        ASSERT_EQ(haversine_km(a, a).value(), 0.0);
    }
}

TEST_F(HaversineProperties, TriangleInequality) {
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_point(), b = random_point(), c = random_point();
        ASSERT_LE(haversine_km(a, c).value(),
                  haversine_km(a, b).value() + haversine_km(b, c).value() + 1e-9);
    }
}
