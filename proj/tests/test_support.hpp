#pragma once

#include <gtest/gtest.h>

#include "vpos/data_model.hpp"
#include "vpos/preprocess.hpp"
#include "vpos/random.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace vpos::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        std::string name = tag;
        if (info)
            name += std::string("_") + info->test_suite_name() + "_" + info->name();
        path_ = std::filesystem::temp_directory_path() / ("vpos_" + name);
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline Scaler identity_scaler(int dim)
{
    Scaler s;
    s.mean = Eigen::VectorXd::Zero(dim);
    s.std = Eigen::VectorXd::Ones(dim);
    return s;
}

/// Standard-normal features with uniform labels in [1, k].
inline std::vector<LabeledPoint> random_points(std::uint64_t seed, int k, int dim, int n)
{
    Rng rng(seed);
    std::vector<LabeledPoint> out(static_cast<std::size_t>(n));
    for (auto& p : out) {
        p.features.resize(dim);
        for (int i = 0; i < dim; ++i)
            p.features[i] = rng.normal();
        p.class_label = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    }
    return out;
}

/// Three well-separated 2-D clusters, ten points each, labels 1..3.
inline std::vector<LabeledPoint> separable_toy(std::uint64_t seed)
{
    Rng rng(seed);
    const double cx[3] = {-3.0, 3.0, 0.0};
    const double cy[3] = {-2.0, -2.0, 3.0};
    std::vector<LabeledPoint> out;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 10; ++i) {
            LabeledPoint p;
            p.features = Eigen::Vector2d(cx[c] + rng.uniform(-0.5, 0.5), cy[c] + rng.uniform(-0.5, 0.5));
            p.class_label = c + 1;
            out.push_back(p);
        }
    return out;
}

} // namespace vpos::test
