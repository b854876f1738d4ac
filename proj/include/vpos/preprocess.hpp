#pragma once

#include "vpos/data_model.hpp"

#include <span>
#include <vector>

namespace vpos {

/// Indices of the records carrying every `required` optional field.
std::vector<std::size_t> complete_records(const Dataset& data, const std::vector<Field>& required);

/// Keeps records with every `required` optional field present, in order.
/// Throws EmptyDataset when nothing survives.
Dataset drop_missing(const Dataset& data, const std::vector<Field>& required);

struct SigmaStats {
    double mean = 0.0;
    double std = 0.0; // n-1 denominator
    std::size_t n = 0;
};

SigmaStats sigma_stats(std::span<const double> values);

struct SigmaFilterResult {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> removed;
    std::vector<SigmaStats> stats; // one per monitored column
};

/// 3-sigma rule over one or more monitored columns (each column holds one
/// value per record). A record is removed when any column has
/// |x - mean| >= 3 std. Columns with std == 0 remove nothing.
SigmaFilterResult three_sigma_filter(const std::vector<std::vector<double>>& columns);

/// Dataset form. Every record must carry the monitored fields.
SigmaFilterResult three_sigma_filter(const Dataset& data, const std::vector<Field>& monitored);

inline const std::vector<Field> kDefaultSigmaFields = {Field::Pressure, Field::Altitude};

enum class ScalingMode { ZScore, MinMax };

/// Per-feature affine map x -> (x - mean) / std. For MinMax scaling `mean`
/// holds the column minimum and `std` the column range.
struct Scaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
    ScalingMode mode = ScalingMode::ZScore;

    int dim() const { return static_cast<int>(mean.size()); }
};

/// Fits on the rows of `train`. Throws TooFewPoints or ZeroVarianceFeature.
Scaler fit_scaler(const FeatureMatrix& train, ScalingMode mode = ScalingMode::ZScore);
Scaler fit_scaler(const std::vector<FeatureVector>& train, ScalingMode mode = ScalingMode::ZScore);

FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& x);
FeatureMatrix apply_scaler(const Scaler& scaler, const FeatureMatrix& rows);
FeatureVector invert_scaler(const Scaler& scaler, const FeatureVector& z);

} // namespace vpos
