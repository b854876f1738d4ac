#include <gtest/gtest.h>

#include "vpos/preprocess.hpp"

#include <cmath>

using namespace vpos;

namespace {

Observation make_obs(int i)
{
    Observation o;
    o.device_id = "d";
    o.time = i;
    o.longitude = 121.0;
    o.latitude = 31.0;
    o.speed = 1.0;
    o.pressure = 1000.0 + i;
    o.altitude = 10.0 + i;
    return o;
}

} // namespace

TEST(DropMissing, RemovesIncomplete)
{
    Dataset data;
    for (int i = 0; i < 10; ++i)
        data.points.push_back(make_obs(i));
    for (int i : {1, 4, 8})
        data.points[static_cast<std::size_t>(i)].pressure.reset();
    const auto kept = drop_missing(data, {Field::Pressure});
    ASSERT_EQ(kept.points.size(), 7u);
    EXPECT_EQ(kept.points[1].time, 2.0);
}

TEST(DropMissing, EmptyRequirementIsIdentity)
{
    Dataset data;
    for (int i = 0; i < 5; ++i)
        data.points.push_back(make_obs(i));
    data.points[2].altitude.reset();
    EXPECT_EQ(drop_missing(data, {}).points, data.points);
}

TEST(DropMissing, NothingSurvives)
{
    Dataset data;
    for (int i = 0; i < 5; ++i) {
        data.points.push_back(make_obs(i));
        data.points.back().altitude.reset();
    }
    try {
        drop_missing(data, {Field::Altitude});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyDataset);
    }
}

TEST(ThreeSigma, SingleLargeValueRemoved)
{
    // With n points a single spike sits at most (n - 1) / sqrt(n) sample deviations out,
    // so it takes n >= 11 before 3 sigma can catch it.
    std::vector<double> v(19, 0.0);
    v.push_back(1000.0);
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= 20.0;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / 19.0);
    const bool oracle_removes = std::fabs(1000.0 - mean) >= 3.0 * sd;

    const auto r = three_sigma_filter(std::vector<std::vector<double>>{v});
    EXPECT_NEAR(r.stats[0].mean, mean, 1e-12);
    EXPECT_NEAR(r.stats[0].std, sd, 1e-12);
    EXPECT_EQ(r.stats[0].n, 20u);
    ASSERT_TRUE(oracle_removes);
    ASSERT_EQ(r.removed.size(), 1u);
    EXPECT_EQ(r.removed[0], 19u);
    EXPECT_EQ(r.kept.size(), 19u);
}

TEST(ThreeSigma, SpikeAmongTenSurvives)
{
    std::vector<double> v(9, 0.0);
    v.push_back(1000.0);
    EXPECT_TRUE(three_sigma_filter(std::vector<std::vector<double>>{v}).removed.empty());
}

TEST(ThreeSigma, ConstantColumnRemovesNothing)
{
    const auto r = three_sigma_filter(std::vector<std::vector<double>>{std::vector<double>(50, 7.0)});
    EXPECT_TRUE(r.removed.empty());
    EXPECT_EQ(r.kept.size(), 50u);
    EXPECT_EQ(r.stats[0].std, 0.0);
}

TEST(ThreeSigma, TooFewPoints)
{
    try {
        three_sigma_filter(std::vector<std::vector<double>>{{1.0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
    }
}

TEST(ThreeSigma, GaussianRetention)
{
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::vector<double> v(10000);
        for (auto& x : v)
            x = rng.normal();
        const auto r = three_sigma_filter(std::vector<std::vector<double>>{v});
        const double frac = static_cast<double>(r.kept.size()) / 10000.0;
        EXPECT_NEAR(frac, 0.9973, 0.005);
        total += frac;
    }
    const double mean = total / 20.0;
    EXPECT_GE(mean, 0.9923);
    EXPECT_LE(mean, 1.0);
}

TEST(ThreeSigma, AnyMonitoredColumnCanRemove)
{
    std::vector<double> a(30, 1.0), b(30, 2.0);
    for (std::size_t i = 0; i < 30; ++i) {
        a[i] += 0.01 * static_cast<double>(i % 5);
        b[i] += 0.01 * static_cast<double>(i % 3);
    }
    a[3] = 50.0;
    b[17] = -50.0;
    const auto r = three_sigma_filter({a, b});
    EXPECT_EQ(r.removed, (std::vector<std::size_t>{3, 17}));
}

TEST(ThreeSigma, RerunNeverReadmits)
{
    Rng rng(9);
    std::vector<double> v(2000);
    for (auto& x : v)
        x = rng.normal() * (rng.bernoulli(0.02) ? 10.0 : 1.0);
    const auto first = three_sigma_filter(std::vector<std::vector<double>>{v});
    std::vector<double> kept_values;
    for (auto i : first.kept)
        kept_values.push_back(v[i]);
    const auto second = three_sigma_filter(std::vector<std::vector<double>>{kept_values});
    EXPECT_LE(second.kept.size(), first.kept.size());
    EXPECT_EQ(second.kept.size() + second.removed.size(), first.kept.size());
}

TEST(ThreeSigma, DatasetOverloadReadsFields)
{
    Dataset data;
    for (int i = 0; i < 40; ++i) {
        data.points.push_back(make_obs(0));
        data.points.back().altitude = 10.0 + 0.1 * (i % 4);
    }
    data.points[12].altitude = 500.0;
    const auto r = three_sigma_filter(data, {Field::Pressure, Field::Altitude});
    EXPECT_EQ(r.removed, std::vector<std::size_t>{12});
    data.points[3].pressure.reset();
    EXPECT_THROW(three_sigma_filter(data, {Field::Pressure}), Error);
}

TEST(Scaler, TwoVectors)
{
    FeatureMatrix m(2, 2);
    m << 0, 0, 2, 2;
    const auto s = fit_scaler(m);
    EXPECT_DOUBLE_EQ(s.mean[0], 1.0);
    EXPECT_DOUBLE_EQ(s.mean[1], 1.0);
    EXPECT_DOUBLE_EQ(s.std[0], std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(s.std[1], std::sqrt(2.0));
}

TEST(Scaler, ConstantFeatureNamed)
{
    FeatureMatrix m(3, 5);
    m << 1, 2, 3, 4, 5, 2, 2, 4, 5, 6, 3, 2, 5, 6, 7;
    try {
        fit_scaler(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroVarianceFeature);
        EXPECT_NE(std::string(e.what()).find("longitude"), std::string::npos);
    }
}

TEST(Scaler, FitSetIsStandardized)
{
    Rng rng(21);
    FeatureMatrix m(100, 5);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rng.normal(1000.0 * static_cast<double>(j), 1.0 + static_cast<double>(j));
    const auto s = fit_scaler(m);
    const auto z = apply_scaler(s, m);
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double mean = z.col(j).mean();
        const double var = (z.col(j).array() - mean).square().sum() / 99.0;
        EXPECT_LT(std::fabs(mean), 1e-10);
        EXPECT_LT(std::fabs(std::sqrt(var) - 1.0), 1e-10);
    }
}

TEST(Scaler, MeansMapToZeroAndInverse)
{
    Scaler s;
    s.mean = Eigen::VectorXd::LinSpaced(5, -3.0, 7.0);
    s.std = Eigen::VectorXd::LinSpaced(5, 0.5, 4.0);
    EXPECT_TRUE(apply_scaler(s, FeatureVector(s.mean)).isZero(0.0));
    const FeatureVector up = s.mean + s.std;
    EXPECT_TRUE(apply_scaler(s, up).isApprox(Eigen::VectorXd::Ones(5), 1e-15));
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        FeatureVector x(5);
        for (int j = 0; j < 5; ++j)
            x[j] = rng.normal(0.0, 100.0);
        const FeatureVector back = invert_scaler(s, apply_scaler(s, x));
        EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Scaler, DimensionMismatch)
{
    Scaler s;
    s.mean = Eigen::VectorXd::Zero(5);
    s.std = Eigen::VectorXd::Ones(5);
    try {
        apply_scaler(s, FeatureVector(Eigen::VectorXd::Zero(4)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(Scaler, MinMaxMapsToUnitInterval)
{
    FeatureMatrix m(4, 2);
    m << 1, 10, 3, 20, 2, 40, 5, 30;
    const auto s = fit_scaler(m, ScalingMode::MinMax);
    const auto z = apply_scaler(s, m);
    EXPECT_DOUBLE_EQ(z.col(0).minCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(z.col(0).maxCoeff(), 1.0);
    EXPECT_DOUBLE_EQ(z.col(1).minCoeff(), 0.0);
    EXPECT_DOUBLE_EQ(z.col(1).maxCoeff(), 1.0);
}
