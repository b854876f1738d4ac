#include "vpos/preprocess.hpp"

#include <cmath>
#include <string>

namespace vpos {

namespace {

constexpr std::string_view kModule = "preprocess";

const std::optional<double>* optional_field(const Observation& obs, Field field)
{
    switch (field) {
    case Field::Speed: return &obs.speed;
    case Field::Pressure: return &obs.pressure;
    case Field::Altitude: return &obs.altitude;
    default: return nullptr;
    }
}

double field_value(const Observation& obs, Field field)
{
    switch (field) {
    case Field::Time: return obs.time;
    case Field::Longitude: return obs.longitude;
    case Field::Latitude: return obs.latitude;
    default: break;
    }
    const auto* opt = optional_field(obs, field);
    if (!opt || !opt->has_value())
        throw Error(ErrorCode::MissingRequiredColumn, kModule,
                    "record of device " + obs.device_id + " lacks " + std::string(field_name(field)));
    return **opt;
}

std::string feature_label(int i, int dim)
{
    if (dim == kFeatureDim)
        return std::string(field_name(kFeatureFields[static_cast<std::size_t>(i)]));
    return "feature " + std::to_string(i);
}

} // namespace

std::vector<std::size_t> complete_records(const Dataset& data, const std::vector<Field>& required)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        bool complete = true;
        for (Field f : required) {
            const auto* opt = optional_field(data.points[i], f);
            if (opt && !opt->has_value()) {
                complete = false;
                break;
            }
        }
        if (complete)
            rows.push_back(i);
    }
    return rows;
}

Dataset drop_missing(const Dataset& data, const std::vector<Field>& required)
{
    Dataset out{{}, data.provenance};
    for (auto i : complete_records(data, required))
        out.points.push_back(data.points[i]);
    if (out.points.empty())
        throw Error(ErrorCode::EmptyDataset, kModule, "no record has all required fields");
    return out;
}

SigmaStats sigma_stats(std::span<const double> values)
{
    if (values.size() < 2)
        throw Error(ErrorCode::TooFewPoints, kModule, "sigma statistics need at least 2 values");
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0)), values.size()};
}

SigmaFilterResult three_sigma_filter(const std::vector<std::vector<double>>& columns)
{
    SigmaFilterResult result;
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) {
        if (col.size() != n)
            throw Error(ErrorCode::DimensionMismatch, kModule, "monitored columns differ in length");
    }
    if (n < 2 && !columns.empty())
        throw Error(ErrorCode::TooFewPoints, kModule, "3-sigma filter needs at least 2 records");

    for (const auto& col : columns)
        result.stats.push_back(sigma_stats(col));

    for (std::size_t i = 0; i < n; ++i) {
        bool outside = false;
        for (std::size_t c = 0; c < columns.size() && !outside; ++c) {
            const auto& s = result.stats[c];
            outside = s.std > 0.0 && std::fabs(columns[c][i] - s.mean) >= 3.0 * s.std;
        }
        (outside ? result.removed : result.kept).push_back(i);
    }
    return result;
}

SigmaFilterResult three_sigma_filter(const Dataset& data, const std::vector<Field>& monitored)
{
    std::vector<std::vector<double>> columns(monitored.size());
    for (std::size_t c = 0; c < monitored.size(); ++c) {
        columns[c].reserve(data.points.size());
        for (const auto& obs : data.points)
            columns[c].push_back(field_value(obs, monitored[c]));
    }
    if (data.points.size() < 2)
        throw Error(ErrorCode::TooFewPoints, kModule, "3-sigma filter needs at least 2 records");
    auto result = three_sigma_filter(columns);
    if (monitored.empty()) {
        for (std::size_t i = 0; i < data.points.size(); ++i)
            result.kept.push_back(i);
    }
    return result;
}

Scaler fit_scaler(const FeatureMatrix& train, ScalingMode mode)
{
    if (train.rows() < 2)
        throw Error(ErrorCode::TooFewPoints, kModule, "scaler needs at least 2 vectors");
    const auto dim = static_cast<int>(train.cols());
    Scaler s;
    s.mode = mode;
    s.mean.resize(dim);
    s.std.resize(dim);
    const double n = static_cast<double>(train.rows());
    for (int j = 0; j < dim; ++j) {
        const auto col = train.col(j);
        if (mode == ScalingMode::ZScore) {
            const double mean = col.sum() / n;
            const double var = (col.array() - mean).square().sum() / (n - 1.0);
            s.mean[j] = mean;
            s.std[j] = std::sqrt(var);
        } else {
            s.mean[j] = col.minCoeff();
            s.std[j] = col.maxCoeff() - col.minCoeff();
        }
        if (!(s.std[j] > 0.0))
            throw Error(ErrorCode::ZeroVarianceFeature, kModule,
                        feature_label(j, dim) + " is constant on the training data");
    }
    return s;
}

Scaler fit_scaler(const std::vector<FeatureVector>& train, ScalingMode mode)
{
    if (train.empty())
        throw Error(ErrorCode::TooFewPoints, kModule, "scaler needs at least 2 vectors");
    FeatureMatrix rows(static_cast<Eigen::Index>(train.size()), train.front().size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (train[i].size() != rows.cols())
            throw Error(ErrorCode::DimensionMismatch, kModule, "feature vectors differ in length");
        rows.row(static_cast<Eigen::Index>(i)) = train[i].transpose();
    }
    return fit_scaler(rows, mode);
}

FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& x)
{
    if (x.size() != scaler.mean.size())
        throw Error(ErrorCode::DimensionMismatch, kModule,
                    "vector has " + std::to_string(x.size()) + " entries, scaler expects "
                        + std::to_string(scaler.mean.size()));
    return ((x - scaler.mean).array() / scaler.std.array()).matrix();
}

FeatureMatrix apply_scaler(const Scaler& scaler, const FeatureMatrix& rows)
{
    if (rows.cols() != scaler.mean.size())
        throw Error(ErrorCode::DimensionMismatch, kModule, "matrix width does not match scaler");
    FeatureMatrix out(rows.rows(), rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
        out.col(j) = (rows.col(j).array() - scaler.mean[j]) / scaler.std[j];
    return out;
}

FeatureVector invert_scaler(const Scaler& scaler, const FeatureVector& z)
{
    if (z.size() != scaler.mean.size())
        throw Error(ErrorCode::DimensionMismatch, kModule, "vector length does not match scaler");
    return (z.array() * scaler.std.array() + scaler.mean.array()).matrix();
}

} // namespace vpos
