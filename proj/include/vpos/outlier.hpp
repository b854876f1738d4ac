#pragma once

#include "vpos/data_model.hpp"
#include "vpos/geo.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace vpos {

/// Records from one device within a short time window, sorted by time.
struct Trace {
    std::string device_id;
    std::vector<Observation> observations;
    std::vector<std::size_t> source_rows; // position of each observation in the grouped Dataset

    std::size_t size() const { return observations.size(); }
    double duration() const;
    /// Mean of the recorded speeds; absent speeds are skipped. 0 when none.
    double mean_speed() const;
};

struct OutlierVerdict {
    std::size_t index = 0; // position in the trace
    double exceed_fraction = 0.0;
    bool is_outlier = false;
};

inline constexpr double kDefaultTraceWindow = 3600.0;

/// Partitions by device (in order of first appearance), sorts each device by
/// time, and starts a new trace whenever consecutive timestamps are more than
/// `window` seconds apart.
std::vector<Trace> group_traces(const Dataset& data, double window = kDefaultTraceWindow);

/// Symmetric n x n haversine distances. Throws TraceTooShort for n < 2.
Eigen::MatrixXd pairwise_distance_matrix(const Trace& trace, const geo::EarthModel& earth = {});

/// Majority vote against d_max given a precomputed distance matrix.
std::vector<OutlierVerdict> verdicts_from_matrix(const Eigen::MatrixXd& distances, double d_max);

/// A point is an outlier when more than half of its distances to the other
/// points of the trace exceed d_max = mean_speed * duration. Throws
/// TraceTooShort for n < 3.
std::vector<OutlierVerdict> detect_outliers(const Trace& trace, const geo::EarthModel& earth = {});

/// Verdicts keyed by Dataset row, for traces long enough to vote.
struct DetectionResult {
    std::vector<Trace> traces;
    std::vector<std::vector<OutlierVerdict>> verdicts; // parallel to traces; empty for short traces
    std::vector<bool> is_outlier;                       // one entry per Dataset row
};

DetectionResult detect_dataset_outliers(const Dataset& data, double window = kDefaultTraceWindow,
                                        const geo::EarthModel& earth = {});

/// CSV `device_id,index,exceed_fraction,is_outlier`. `index` is the Dataset
/// row of the verdict so the file can be joined back to its input.
void write_verdicts(std::ostream& out, const DetectionResult& result);
void write_verdicts(const std::filesystem::path& path, const DetectionResult& result);

struct RowVerdict {
    bool has_verdict = false;
    double exceed_fraction = 0.0;
    bool is_outlier = false;
};

/// Reads a verdict CSV back into one entry per Dataset row (`rows` total).
std::vector<RowVerdict> read_verdicts(const std::filesystem::path& path, std::size_t rows);
std::vector<bool> read_outlier_mask(const std::filesystem::path& path, std::size_t rows);

} // namespace vpos
