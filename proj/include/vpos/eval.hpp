#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vpos::eval {

/// Summary of absolute vertical errors, in meters.
struct ErrorStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0; // n-1 denominator; 0 for a single error
    double p67 = 0.0;
    double p90 = 0.0;
    std::size_t count = 0;
};

/// Nearest-rank percentile of an ascending sequence: element ceil(p N / 100)
/// (1-based). `percent` is an integer in [1, 100].
double nearest_rank(std::span<const double> sorted, int percent);

/// Throws EmptySequence.
ErrorStats error_stats(std::span<const double> errors);

struct CdfPoint {
    double error = 0.0;
    double cum_prob = 0.0;
};

/// Sorted step samples (x_(i), i/N). With `collapse`, repeated errors keep
/// only their largest cumulative probability. Throws EmptySequence.
std::vector<CdfPoint> cdf_points(std::span<const double> errors, bool collapse = false);

inline constexpr std::string_view kSourceGroundTruth = "ground_truth";
inline constexpr std::string_view kSourceObserved = "observed";

struct ErrorReport {
    std::string method_name;
    std::vector<double> errors;
    ErrorStats stats;
    std::string altitude_source = std::string(kSourceGroundTruth);
};

ErrorReport make_report(std::string method_name, std::vector<double> errors,
                        std::string_view altitude_source = kSourceGroundTruth);

enum class ReportFormat { Csv, Text };

/// Writes the summary table to `path` and each method's CDF to
/// `<method>.cdf.csv` next to it. Throws IoFailure.
void write_report(const std::vector<ErrorReport>& reports, const std::filesystem::path& path,
                  ReportFormat format = ReportFormat::Csv);

} // namespace vpos::eval
