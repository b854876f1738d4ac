#include "vpos/outlier.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace vpos {

namespace {
constexpr std::string_view kModule = "outlier";
}

double Trace::duration() const
{
    if (observations.empty())
        return 0.0;
    return observations.back().time - observations.front().time;
}

double Trace::mean_speed() const
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& obs : observations) {
        if (obs.speed) {
            sum += *obs.speed;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

std::vector<Trace> group_traces(const Dataset& data, double window)
{
    std::vector<std::string> device_order;
    std::map<std::string, std::vector<std::size_t>> rows_by_device;
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        auto [it, inserted] = rows_by_device.try_emplace(data.points[i].device_id);
        if (inserted)
            device_order.push_back(data.points[i].device_id);
        it->second.push_back(i);
    }

    std::vector<Trace> traces;
    for (const auto& device : device_order) {
        auto rows = rows_by_device[device];
        std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            return data.points[a].time < data.points[b].time;
        });
        Trace current{device, {}, {}};
        for (std::size_t r : rows) {
            const auto& obs = data.points[r];
            if (!current.observations.empty() && obs.time - current.observations.back().time > window) {
                traces.push_back(std::move(current));
                current = Trace{device, {}, {}};
            }
            current.observations.push_back(obs);
            current.source_rows.push_back(r);
        }
        if (!current.observations.empty())
            traces.push_back(std::move(current));
    }
    return traces;
}

Eigen::MatrixXd pairwise_distance_matrix(const Trace& trace, const geo::EarthModel& earth)
{
    const auto n = static_cast<Eigen::Index>(trace.size());
    if (n < 2)
        throw Error(ErrorCode::TraceTooShort, kModule, "distance matrix needs at least 2 points");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& a = trace.observations[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& b = trace.observations[static_cast<std::size_t>(j)];
            const double dist = geo::haversine_distance({a.longitude, a.latitude}, {b.longitude, b.latitude}, earth);
            d(i, j) = dist;
            d(j, i) = dist;
        }
    }
    return d;
}

std::vector<OutlierVerdict> verdicts_from_matrix(const Eigen::MatrixXd& distances, double d_max)
{
    const auto n = distances.rows();
    if (n < 3 || distances.cols() != n)
        throw Error(ErrorCode::TraceTooShort, kModule, "outlier vote needs at least 3 points");
    std::vector<OutlierVerdict> verdicts;
    verdicts.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        std::size_t exceed = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i && distances(i, j) > d_max)
                ++exceed;
        }
        const auto others = static_cast<std::size_t>(n - 1);
        // Integer comparison keeps an exact 50% tie from voting.
        verdicts.push_back({static_cast<std::size_t>(i),
                            static_cast<double>(exceed) / static_cast<double>(others),
                            2 * exceed > others});
    }
    return verdicts;
}

std::vector<OutlierVerdict> detect_outliers(const Trace& trace, const geo::EarthModel& earth)
{
    if (trace.size() < 3)
        throw Error(ErrorCode::TraceTooShort, kModule,
                    "trace of device " + trace.device_id + " has " + std::to_string(trace.size())
                        + " points, outlier vote needs 3");
    const double d_max = geo::diameter_threshold(trace.mean_speed(), trace.duration());
    return verdicts_from_matrix(pairwise_distance_matrix(trace, earth), d_max);
}

DetectionResult detect_dataset_outliers(const Dataset& data, double window, const geo::EarthModel& earth)
{
    DetectionResult result;
    result.traces = group_traces(data, window);
    result.is_outlier.assign(data.points.size(), false);
    for (const auto& trace : result.traces) {
        if (trace.size() < 3) {
            result.verdicts.emplace_back();
            continue;
        }
        auto verdicts = detect_outliers(trace, earth);
        for (const auto& v : verdicts)
            result.is_outlier[trace.source_rows[v.index]] = v.is_outlier;
        result.verdicts.push_back(std::move(verdicts));
    }
    return result;
}

void write_verdicts(std::ostream& out, const DetectionResult& result)
{
    out << "device_id,index,exceed_fraction,is_outlier\n";
    for (std::size_t t = 0; t < result.traces.size(); ++t) {
        const auto& trace = result.traces[t];
        for (const auto& v : result.verdicts[t]) {
            out << trace.device_id << ',' << trace.source_rows[v.index] << ','
                << format_double(v.exceed_fraction) << ',' << (v.is_outlier ? 1 : 0) << '\n';
        }
    }
}

void write_verdicts(const std::filesystem::path& path, const DetectionResult& result)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "cannot write " + path.string());
    write_verdicts(out, result);
}

std::vector<RowVerdict> read_verdicts(const std::filesystem::path& path, std::size_t rows)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::FileNotFound, kModule, "cannot open " + path.string());
    std::vector<RowVerdict> verdicts(rows);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (cells.size() != 4)
            throw Error(ErrorCode::MalformedNumber, kModule, "bad verdict line: " + line);
        std::size_t row = 0;
        double fraction = 0.0;
        try {
            row = std::stoul(cells[1]);
            fraction = std::stod(cells[2]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::MalformedNumber, kModule, "bad verdict line: " + line);
        }
        if (row >= rows)
            throw Error(ErrorCode::IndexMismatch, kModule,
                        "verdict row " + cells[1] + " beyond dataset of " + std::to_string(rows));
        verdicts[row] = {true, fraction, cells[3] == "1"};
    }
    return verdicts;
}

std::vector<bool> read_outlier_mask(const std::filesystem::path& path, std::size_t rows)
{
    std::vector<bool> mask;
    mask.reserve(rows);
    for (const auto& v : read_verdicts(path, rows))
        mask.push_back(v.is_outlier);
    return mask;
}

} // namespace vpos
