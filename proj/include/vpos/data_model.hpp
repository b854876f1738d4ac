#pragma once

#include "vpos/error.hpp"
#include "vpos/random.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vpos {

/// One timestamped sensor record.
struct Observation {
    std::string device_id;
    double time = 0.0;      // seconds since Unix epoch
    double longitude = 0.0; // degrees
    double latitude = 0.0;  // degrees
    std::optional<double> speed;    // m/s
    std::optional<double> pressure; // hPa
    std::optional<double> altitude; // m

    bool operator==(const Observation&) const = default;
};

enum class Field { DeviceId, Time, Longitude, Latitude, Speed, Pressure, Altitude };

std::string_view field_name(Field field) noexcept;
std::optional<Field> parse_field(std::string_view name) noexcept;

/// Feature order used everywhere a FeatureVector is built.
inline constexpr std::array<Field, 5> kFeatureFields = {
    Field::Time, Field::Longitude, Field::Latitude, Field::Pressure, Field::Speed};
inline constexpr int kFeatureDim = static_cast<int>(kFeatureFields.size());

using FeatureVector = Eigen::VectorXd;
using FeatureMatrix = Eigen::MatrixXd; // one row per point

/// Builds (time, longitude, latitude, pressure, speed). Throws
/// MissingRequiredColumn when pressure or speed is absent.
FeatureVector features_of(const Observation& obs);

struct LabeledPoint {
    FeatureVector features;
    double altitude = 0.0;
    int class_label = 1; // 1-based
};

struct Dataset {
    std::vector<Observation> points;
    std::string provenance;
};

/// A skipped input row. Row numbers count data rows from 1 (header excluded).
struct Rejection {
    std::size_t row = 0;
    ErrorCode reason = ErrorCode::MalformedNumber;
    std::string detail;
};

/// Column layout of an observation CSV. Unknown column names are ignored.
struct CsvSchema {
    std::vector<std::string> columns;

    static CsvSchema default_schema();
    static CsvSchema from_header(std::string_view header_line);
    std::string header() const;
};

using ParseResult = std::variant<Observation, Rejection>;

ParseResult parse_csv_record(std::string_view line, const CsvSchema& schema, std::size_t row = 0);

struct LoadResult {
    Dataset dataset;
    std::vector<Rejection> rejections;
    std::vector<std::size_t> rows; // data row number of each accepted point
};

/// Reads a CSV with a header line. Throws FileNotFound or EmptyDataset.
LoadResult load_dataset(const std::filesystem::path& path,
                        const CsvSchema& schema = CsvSchema::default_schema());

std::string format_record(const Observation& obs, const CsvSchema& schema);
void write_dataset(std::ostream& out, const Dataset& data,
                   const CsvSchema& schema = CsvSchema::default_schema());
void write_dataset(const std::filesystem::path& path, const Dataset& data,
                   const CsvSchema& schema = CsvSchema::default_schema());

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

inline constexpr std::uint64_t kDefaultSeed = 20181005;

/// Index form of split_train_test: a seeded shuffle of 0..n-1 cut after
/// round(train_fraction * n) entries.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>>
split_train_test(const std::vector<T>& points, double train_fraction, std::uint64_t seed = kDefaultSeed)
{
    auto [train_idx, test_idx] = split_indices(points.size(), train_fraction, seed);
    std::pair<std::vector<T>, std::vector<T>> out;
    out.first.reserve(train_idx.size());
    out.second.reserve(test_idx.size());
    for (auto i : train_idx)
        out.first.push_back(points[i]);
    for (auto i : test_idx)
        out.second.push_back(points[i]);
    return out;
}

} // namespace vpos
