#include "test_support.hpp"

#include "vpos/model_io.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace vpos;

namespace {

mlr::MLRModel random_mlr(Rng& rng, const mlr::FeatureSubset& subset)
{
    const QuantizationScheme scheme(-3.1, 77.7, 4.0);
    mlr::MLRModel m{.weights = Eigen::MatrixXd::Zero(scheme.num_classes(), 5),
                    .bias = Eigen::VectorXd(scheme.num_classes()),
                    .subset = subset,
                    .scheme = scheme,
                    .scaler = test::identity_scaler(5),
                    .lambda = 1e-3,
                    .intercept = true};
    for (int k = 0; k < scheme.num_classes(); ++k) {
        for (int i : subset)
            m.weights(k, i) = rng.normal(0.0, 1e3) / 3.0;
        m.bias[k] = rng.normal() * 1e-7;
    }
    for (int i = 0; i < 5; ++i) {
        m.scaler.mean[i] = rng.normal(1000.0, 500.0);
        m.scaler.std[i] = rng.uniform(0.001, 10.0);
    }
    return m;
}

void expect_same(const mlr::MLRModel& a, const mlr::MLRModel& b)
{
    EXPECT_TRUE(a.weights == b.weights);
    EXPECT_TRUE(a.bias == b.bias);
    EXPECT_EQ(a.subset, b.subset);
    EXPECT_EQ(a.scheme, b.scheme);
    EXPECT_TRUE(a.scaler.mean == b.scaler.mean);
    EXPECT_TRUE(a.scaler.std == b.scaler.std);
    EXPECT_EQ(a.scaler.mode, b.scaler.mode);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.intercept, b.intercept);
}

} // namespace

TEST(ModelIo, MlrRoundTripIsExact)
{
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_mlr(rng, trial % 2 ? mlr::FeatureSubset{0, 2, 4} : mlr::full_subset(5));
        std::stringstream s;
        io::write_mlr(s, m);
        const auto back = io::read_mlr(s);
        expect_same(m, back);
        std::stringstream again;
        io::write_mlr(again, back);
        EXPECT_EQ(again.str(), s.str());
    }
}

TEST(ModelIo, EnsembleRoundTripIsExact)
{
    Rng rng(102);
    test::TempDir dir("io_ens");
    wmlr::EnsembleModel e{.scheme = QuantizationScheme(-3.1, 77.7, 4.0), .scaler = test::identity_scaler(5)};
    for (const auto& s : wmlr::make_subsets(5, 4, 5, wmlr::SubsetMode::Enumerate))
        e.models.push_back(random_mlr(rng, s));
    e.weighting = wmlr::Weighting::Inverse;
    e.lambda = 0.25;
    e.subset_size = 4;
    e.subset_mode = wmlr::SubsetMode::Random;
    e.seed = 123456789012345ULL;
    io::save_ensemble(dir / "e.model", e);
    const auto back = io::load_ensemble(dir / "e.model");
    ASSERT_EQ(back.size(), 5u);
    for (std::size_t l = 0; l < 5; ++l)
        expect_same(e.models[l], back.models[l]);
    EXPECT_EQ(back.scheme, e.scheme);
    EXPECT_EQ(back.weighting, e.weighting);
    EXPECT_EQ(back.lambda, e.lambda);
    EXPECT_EQ(back.subset_size, 4);
    EXPECT_EQ(back.subset_mode, e.subset_mode);
    EXPECT_EQ(back.seed, e.seed);
    io::save_ensemble(dir / "f.model", back);
    EXPECT_EQ(test::slurp(dir / "e.model"), test::slurp(dir / "f.model"));
}

TEST(ModelIo, SvmRoundTripIsExact)
{
    Rng rng(103);
    test::TempDir dir("io_svm");
    io::SvmArtifact a{svm::LinearSVMModel{Eigen::MatrixXd(4, 5), Eigen::VectorXd(4), 0.125},
                      QuantizationScheme(0.0, 13.0, 4.0), test::identity_scaler(5)};
    for (int k = 0; k < 4; ++k) {
        for (int i = 0; i < 5; ++i)
            a.model.weights(k, i) = rng.normal() / 7.0;
        a.model.bias[k] = rng.normal() / 11.0;
    }
    a.scaler.mode = ScalingMode::MinMax;
    io::save_svm(dir / "s.model", a);
    const auto back = io::load_svm(dir / "s.model");
    EXPECT_TRUE(back.model.weights == a.model.weights);
    EXPECT_TRUE(back.model.bias == a.model.bias);
    EXPECT_EQ(back.model.c, 0.125);
    EXPECT_EQ(back.scheme, a.scheme);
    EXPECT_EQ(back.scaler.mode, ScalingMode::MinMax);
}

TEST(ModelIo, MalformedInput)
{
    auto code_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            io::read_mlr(in);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    EXPECT_EQ(code_of(""), ErrorCode::MalformedModel);
    EXPECT_EQ(code_of("not a model"), ErrorCode::MalformedModel);

    Rng rng(104);
    std::stringstream s;
    io::write_mlr(s, random_mlr(rng, mlr::full_subset(5)));
    const auto text = s.str();
    EXPECT_EQ(code_of(text.substr(0, text.size() / 2)), ErrorCode::MalformedModel);

    test::TempDir dir("io_bad");
    try {
        io::load_mlr(dir / "absent.model");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
    }
}
