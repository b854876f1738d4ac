#include "test_support.hpp"

#include "vpos/synthetic.hpp"

#include <cmath>

using namespace vpos;
using namespace vpos::synth;

namespace {
const double kRoot = std::pow(44330.8 / 4946.54, 1.0 / 0.1902632);
}

TEST(Barometric, Examples)
{
    // Independent evaluation of h = 44330.8 - 4946.54 p^0.1902632.
    const double oracle = 44330.8 - 4946.54 * std::pow(101325.0, 0.1902632);
    EXPECT_NEAR(barometric_altitude(101325.0), oracle, 1e-9);
    EXPECT_LT(std::fabs(barometric_altitude(101325.0)), 1.0);
    EXPECT_NEAR(barometric_altitude(kRoot), 0.0, 1e-9);
    EXPECT_GT(barometric_altitude(100000.0), barometric_altitude(101000.0));
    try {
        barometric_altitude(0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositivePressure);
    }
}

TEST(Barometric, InverseRoundTrip)
{
    EXPECT_NEAR(inverse_barometric_pressure(0.0), kRoot, 1e-9 * kRoot);
    EXPECT_NEAR(barometric_altitude(inverse_barometric_pressure(123.4)), 123.4, 123.4 * 1e-9);
    EXPECT_NEAR(barometric_altitude(inverse_barometric_pressure(20.0)), 20.0, 20.0 * 1e-9);
    double previous = inverse_barometric_pressure(-500.0);
    for (double h = -499.0; h < 3000.0; h += 7.3) {
        const double p = inverse_barometric_pressure(h);
        EXPECT_LT(p, previous);
        previous = p;
    }
    try {
        inverse_barometric_pressure(44330.8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AltitudeAboveModelCeiling);
    }
}

TEST(Generate, NoiselessClosure)
{
    SynthConfig cfg;
    cfg.n_devices = 8;
    cfg.points_per_device = 50;
    cfg.pressure_noise_sd = 0.0;
    cfg.altitude_noise_sd = 0.0;
    cfg.outlier_fraction = 0.0;
    cfg.seed = 92;
    const auto s = generate_dataset(cfg);
    ASSERT_EQ(s.device_bias_hpa.size(), 8u);
    double sum_p = 0.0, sum_h = 0.0;
    std::vector<double> p_unbiased, h;
    for (std::size_t i = 0; i < s.dataset.points.size(); ++i) {
        const auto& o = s.dataset.points[i];
        const double bias = s.device_bias_hpa[i / 50];
        const double pa = (*o.pressure - bias) * kPascalsPerHectopascal;
        EXPECT_NEAR(*o.altitude, barometric_altitude(pa), 1e-6);
        EXPECT_EQ(*o.altitude, s.truth.true_altitude[i]);
        EXPECT_FALSE(s.truth.is_outlier[i]);
        // Local linearization of the barometric curve.
        p_unbiased.push_back(pa);
        h.push_back(*o.altitude);
        sum_p += pa;
        sum_h += *o.altitude;
    }
    const double mp = sum_p / static_cast<double>(h.size());
    const double mh = sum_h / static_cast<double>(h.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        sxy += (p_unbiased[i] - mp) * (h[i] - mh);
        sxx += (p_unbiased[i] - mp) * (p_unbiased[i] - mp);
        syy += (h[i] - mh) * (h[i] - mh);
    }
    EXPECT_NEAR(sxy / std::sqrt(sxx * syy), -1.0, 1e-6);
}

TEST(Generate, RangesAndSchema)
{
    SynthConfig cfg;
    cfg.n_devices = 10;
    cfg.points_per_device = 100;
    cfg.seed = 93;
    const auto s = generate_dataset(cfg);
    ASSERT_EQ(s.dataset.points.size(), 1000u);
    ASSERT_EQ(s.truth.true_altitude.size(), 1000u);
    ASSERT_EQ(s.truth.is_outlier.size(), 1000u);
    for (std::size_t i = 0; i < 1000; ++i) {
        const auto& o = s.dataset.points[i];
        EXPECT_GE(s.truth.true_altitude[i], cfg.altitude_low);
        EXPECT_LE(s.truth.true_altitude[i], cfg.altitude_high);
        ASSERT_TRUE(o.speed && o.pressure && o.altitude);
        EXPECT_GE(*o.speed, cfg.speed_low);
        EXPECT_LE(*o.speed, cfg.speed_high);
        EXPECT_GT(*o.pressure, 1000.0);
        EXPECT_LT(*o.pressure, 1030.0);
        if (s.truth.is_outlier[i])
            EXPECT_GE(std::fabs(*o.altitude - s.truth.true_altitude[i]), cfg.outlier_offset / 2.0);
        else {
            EXPECT_LE(std::fabs(o.longitude - cfg.center_longitude), cfg.half_width_longitude + 1e-12);
            EXPECT_LE(std::fabs(o.latitude - cfg.center_latitude), cfg.half_width_latitude + 1e-12);
        }
        if (i % 100 > 0) {
            EXPECT_EQ(o.device_id, s.dataset.points[i - 1].device_id);
            EXPECT_EQ(o.time - s.dataset.points[i - 1].time, cfg.sample_interval);
        }
    }
}

TEST(Generate, DeterministicCsv)
{
    test::TempDir dir("synth");
    SynthConfig cfg;
    cfg.n_devices = 5;
    cfg.points_per_device = 40;
    cfg.seed = 94;
    write_dataset(dir / "a.csv", generate_dataset(cfg).dataset);
    write_dataset(dir / "b.csv", generate_dataset(cfg).dataset);
    EXPECT_EQ(test::slurp(dir / "a.csv"), test::slurp(dir / "b.csv"));
    cfg.seed = 95;
    write_dataset(dir / "c.csv", generate_dataset(cfg).dataset);
    EXPECT_NE(test::slurp(dir / "a.csv"), test::slurp(dir / "c.csv"));
}

TEST(Generate, OutlierCountIsBinomial)
{
    SynthConfig cfg;
    cfg.n_devices = 10;
    cfg.points_per_device = 100;
    cfg.outlier_fraction = 0.05;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        cfg.seed = seed;
        const auto s = generate_dataset(cfg);
        int flagged = 0;
        for (bool f : s.truth.is_outlier)
            flagged += f;
        // Mean 50, sd about 6.9; four sd either side.
        EXPECT_GE(flagged, 22);
        EXPECT_LE(flagged, 78);
    }
}

TEST(Generate, GroundTruthRoundTrip)
{
    test::TempDir dir("truth");
    SynthConfig cfg;
    cfg.n_devices = 3;
    cfg.points_per_device = 30;
    cfg.outlier_fraction = 0.1;
    const auto s = generate_dataset(cfg);
    write_ground_truth(dir / "t.csv", s.truth);
    const auto back = read_ground_truth(dir / "t.csv");
    EXPECT_EQ(back.true_altitude, s.truth.true_altitude);
    EXPECT_EQ(back.is_outlier, s.truth.is_outlier);
    EXPECT_EQ(test::slurp(dir / "t.csv").substr(0, 30), "index,true_altitude,is_outlier");
}

TEST(Generate, InvalidConfig)
{
    auto code_of = [](SynthConfig cfg) {
        try {
            generate_dataset(cfg);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    SynthConfig cfg;
    cfg.outlier_fraction = 1.0;
    EXPECT_EQ(code_of(cfg), ErrorCode::InvalidConfig);
    cfg = {};
    cfg.altitude_noise_sd = -1.0;
    EXPECT_EQ(code_of(cfg), ErrorCode::InvalidConfig);
    cfg = {};
    cfg.n_devices = 0;
    EXPECT_EQ(code_of(cfg), ErrorCode::InvalidConfig);
    cfg = {};
    cfg.altitude_high = cfg.altitude_low;
    EXPECT_EQ(code_of(cfg), ErrorCode::InvalidConfig);
}
