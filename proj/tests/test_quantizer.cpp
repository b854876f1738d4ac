#include "test_support.hpp"

#include "vpos/quantizer.hpp"

#include <cmath>
#include <vector>

using namespace vpos;

namespace {

// Linear scan over the interval layout: class k covers (h_min + (k-1) d, h_min + k d].
int interval_scan(double h_min, double delta, int num_classes, double h)
{
    if (h == h_min)
        return 1;
    for (int k = 1; k <= num_classes; ++k)
        if (h > h_min + (k - 1) * delta && h <= h_min + k * delta)
            return k;
    return -1;
}

} // namespace

TEST(Quantizer, LowerBoundaryIsClassOne)
{
    const QuantizationScheme s(0.0, 80.0, 4.0);
    EXPECT_EQ(s.class_of(0.0), 1);
}

TEST(Quantizer, InteriorAndBoundaryClasses)
{
    const QuantizationScheme s(0.0, 80.0, 4.0);
    EXPECT_EQ(s.class_of(10.0), 3);
    EXPECT_EQ(s.class_of(10.0), interval_scan(0.0, 4.0, s.num_classes(), 10.0));
    EXPECT_EQ(s.class_of(4.0), 1);
    EXPECT_EQ(s.class_of(4.0000001), 2);
}

TEST(Quantizer, ClassCount)
{
    EXPECT_EQ(QuantizationScheme(0.0, 80.0, 4.0).num_classes(), 21);
    EXPECT_EQ(QuantizationScheme(0.0, 81.0, 4.0).num_classes(), 22);
    EXPECT_EQ(QuantizationScheme(-3.0, -2.0, 4.0).num_classes(), 2);
}

TEST(Quantizer, PredictedAltitudeCenters)
{
    const QuantizationScheme s(0.0, 80.0, 4.0);
    EXPECT_EQ(s.predicted_altitude(1), 2.0);
    EXPECT_EQ(s.predicted_altitude(3), 10.0);
    const int k = s.num_classes();
    EXPECT_DOUBLE_EQ(s.predicted_altitude(k), (k - 0.5) * 4.0);
    const QuantizationScheme t(-7.5, 30.0, 2.5);
    for (int c = 1; c <= t.num_classes(); ++c) {
        const double p = t.predicted_altitude(c);
        EXPECT_GT(p, t.h_min());
        EXPECT_LT(p, t.h_min() + t.num_classes() * t.delta());
    }
}

TEST(Quantizer, Errors)
{
    const QuantizationScheme s(0.0, 80.0, 4.0);
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    EXPECT_EQ(code_of([&] { s.class_of(-0.001); }), ErrorCode::AltitudeOutOfRange);
    EXPECT_EQ(code_of([&] { s.class_of(80.001); }), ErrorCode::AltitudeOutOfRange);
    EXPECT_EQ(code_of([&] { s.class_of(std::nan("")); }), ErrorCode::AltitudeOutOfRange);
    EXPECT_EQ(code_of([&] { s.predicted_altitude(0); }), ErrorCode::ClassOutOfRange);
    EXPECT_EQ(code_of([&] { s.predicted_altitude(s.num_classes() + 1); }), ErrorCode::ClassOutOfRange);
    EXPECT_EQ(code_of([] { QuantizationScheme(5.0, 5.0, 4.0); }), ErrorCode::InvalidScheme);
    EXPECT_EQ(code_of([] { QuantizationScheme(0.0, 5.0, 0.0); }), ErrorCode::InvalidScheme);
    EXPECT_EQ(code_of([] { QuantizationScheme(0.0, 5.0, -1.0); }), ErrorCode::InvalidScheme);
}

TEST(Quantizer, FromAltitudes)
{
    const std::vector<double> h{12.0, -3.0, 40.5, 7.0};
    const auto s = QuantizationScheme::from_altitudes(h, 4.0);
    EXPECT_EQ(s.h_min(), -3.0);
    EXPECT_EQ(s.h_max(), 40.5);
    EXPECT_EQ(s.delta(), 4.0);
    EXPECT_THROW(QuantizationScheme::from_altitudes(std::vector<double>{}, 4.0), Error);
}

TEST(Quantizer, SweepRoundTripMonotoneAndCoverage)
{
    const double h_min = -2.7;
    const double h_max = 83.9;
    const QuantizationScheme s(h_min, h_max, 4.0);
    const int n = 10000;
    int previous = 1;
    std::vector<bool> seen(static_cast<std::size_t>(s.num_classes()) + 1, false);
    seen[static_cast<std::size_t>(s.class_of(h_min))] = true;
    for (int i = 1; i <= n; ++i) {
        const double h = h_min + (h_max - h_min) * i / n;
        const int k = s.class_of(h);
        EXPECT_EQ(k, interval_scan(h_min, 4.0, s.num_classes(), h)) << h;
        EXPECT_LE(std::fabs(s.predicted_altitude(k) - h), 2.0) << h;
        EXPECT_GE(k, previous);
        previous = k;
        seen[static_cast<std::size_t>(k)] = true;
    }
    // The top class only begins above h_max, so the sweep reaches classes 1..K-1.
    for (int k = 1; k < s.num_classes(); ++k)
        EXPECT_TRUE(seen[static_cast<std::size_t>(k)]) << k;
    EXPECT_EQ(s.class_of(h_max), s.num_classes() - 1);
}

TEST(Quantizer, ExactMultipleSpan)
{
    const QuantizationScheme s(0.0, 80.0, 4.0);
    EXPECT_EQ(s.class_of(80.0), 20);
    EXPECT_EQ(s.class_of(79.999), 20);
    EXPECT_EQ(s.class_of(76.0), 19);
}
