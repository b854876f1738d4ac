#include <gtest/gtest.h>

#include "vpos/geo.hpp"
#include "vpos/random.hpp"

#include <cmath>

using namespace vpos;
using namespace vpos::geo;

namespace {
constexpr double kR = 6371008.8;
constexpr double kPiRef = 3.141592653589793;
} // namespace

TEST(Haversine, IdenticalPointsAreZero)
{
    EXPECT_EQ(haversine_distance({121.5767, 31.2595}, {121.5767, 31.2595}), 0.0);
}

TEST(Haversine, AntipodesOnEquator)
{
    const double d = haversine_distance({0, 0}, {180, 0});
    EXPECT_NEAR(d, kPiRef * kR, 1e-6);
    EXPECT_NEAR(d, 20015114.4, 0.1);
}

TEST(Haversine, QuarterGreatCircle)
{
    EXPECT_NEAR(haversine_distance({0, 0}, {90, 0}), kPiRef / 2.0 * kR, 1e-6);
    EXPECT_NEAR(haversine_distance({0, 0}, {0, 90}), kPiRef / 2.0 * kR, 1e-6);
}

TEST(Haversine, CustomRadiusScales)
{
    EXPECT_NEAR(haversine_distance({0, 0}, {180, 0}, EarthModel{1.0}), kPiRef, 1e-12);
}

TEST(Haversine, SymmetricExactly)
{
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a{rng.uniform(-180, 180), rng.uniform(-90, 90)};
        const GeoPoint b{rng.uniform(-180, 180), rng.uniform(-90, 90)};
        EXPECT_EQ(haversine_distance(a, b), haversine_distance(b, a));
    }
}

TEST(Haversine, BoundedByHalfCircumference)
{
    Rng rng(4);
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a{rng.uniform(-180, 180), rng.uniform(-90, 90)};
        const GeoPoint b{rng.uniform(-180, 180), rng.uniform(-90, 90)};
        const GeoPoint c{rng.uniform(-180, 180), rng.uniform(-90, 90)};
        for (double d : {haversine_distance(a, b), haversine_distance(b, c), haversine_distance(a, c)}) {
            EXPECT_GE(d, 0.0);
            EXPECT_LE(d, kPiRef * kR * (1.0 + 1e-15));
        }
    }
}

TEST(Haversine, SmallAngleMatchesEquirectangular)
{
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint a{rng.uniform(-170, 170), rng.uniform(-80, 80)};
        const GeoPoint b{a.longitude + rng.uniform(-0.005, 0.005), a.latitude + rng.uniform(-0.005, 0.005)};
        const double mean_lat = (a.latitude + b.latitude) / 2.0 * kPiRef / 180.0;
        const double dx = (b.longitude - a.longitude) * kPiRef / 180.0 * std::cos(mean_lat);
        const double dy = (b.latitude - a.latitude) * kPiRef / 180.0;
        const double approx = kR * std::sqrt(dx * dx + dy * dy);
        if (approx > 1000.0 || approx < 1.0)
            continue;
        EXPECT_NEAR(haversine_distance(a, b) / approx, 1.0, 1e-3);
    }
}

TEST(ChordDistances, ZeroLongitudeDifference)
{
    const auto c = chord_distances({10, 20}, {10, -40});
    EXPECT_EQ(c.along_a, 0.0);
    EXPECT_EQ(c.along_b, 0.0);
}

TEST(ChordDistances, HalfTurnOnEquator)
{
    const auto c = chord_distances({0, 0}, {180, 0});
    EXPECT_NEAR(c.along_a, 2 * kR, 1e-6);
    EXPECT_NEAR(c.along_b, 2 * kR, 1e-6);
}

TEST(ChordDistances, MixedLatitudes)
{
    const auto c = chord_distances({0, 60}, {90, 0});
    const double s45 = std::sqrt(0.5);
    EXPECT_NEAR(c.along_a, 2 * kR * s45 * 0.5, 1e-6);
    EXPECT_NEAR(c.along_b, 2 * kR * s45 * 1.0, 1e-6);
}

TEST(DiameterThreshold, Products)
{
    EXPECT_EQ(diameter_threshold(0.0, 600.0), 0.0);
    EXPECT_EQ(diameter_threshold(2.5, 600.0), 1500.0);
}
