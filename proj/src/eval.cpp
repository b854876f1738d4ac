#include "vpos/eval.hpp"

#include "vpos/data_model.hpp"
#include "vpos/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace vpos::eval {

namespace {

constexpr std::string_view kModule = "eval";

std::string fixed4(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "cannot write " + path.string());
    return out;
}

} // namespace

double nearest_rank(std::span<const double> sorted, int percent)
{
    if (sorted.empty())
        throw Error(ErrorCode::EmptySequence, kModule, "percentile of an empty sequence");
    const std::size_t n = sorted.size();
    const std::size_t p = static_cast<std::size_t>(std::clamp(percent, 1, 100));
    const std::size_t rank = (p * n + 99) / 100; // ceil in integers
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

ErrorStats error_stats(std::span<const double> errors)
{
    if (errors.empty())
        throw Error(ErrorCode::EmptySequence, kModule, "no errors to summarize");
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    ErrorStats s;
    s.count = n;
    s.min = sorted.front();
    s.max = sorted.back();
    double sum = 0.0;
    for (double e : sorted)
        sum += e;
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double e : sorted)
            ss += (e - s.mean) * (e - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(n - 1));
    }
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    s.p67 = nearest_rank(sorted, 67);
    s.p90 = nearest_rank(sorted, 90);
    return s;
}

std::vector<CdfPoint> cdf_points(std::span<const double> errors, bool collapse)
{
    if (errors.empty())
        throw Error(ErrorCode::EmptySequence, kModule, "no errors for a CDF");
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<CdfPoint> points;
    points.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double prob = i + 1 == sorted.size() ? 1.0 : static_cast<double>(i + 1) / n;
        if (collapse && !points.empty() && points.back().error == sorted[i])
            points.back().cum_prob = prob;
        else
            points.push_back({sorted[i], prob});
    }
    return points;
}

ErrorReport make_report(std::string method_name, std::vector<double> errors, std::string_view altitude_source)
{
    ErrorReport r;
    r.stats = error_stats(errors);
    r.method_name = std::move(method_name);
    r.errors = std::move(errors);
    r.altitude_source = std::string(altitude_source);
    return r;
}

void write_report(const std::vector<ErrorReport>& reports, const std::filesystem::path& path, ReportFormat format)
{
    auto out = open_for_write(path);
    if (format == ReportFormat::Csv) {
        out << "method,min,max,mean,median,std,p67,p90\n";
        for (const auto& r : reports) {
            const auto& s = r.stats;
            out << r.method_name << ',' << format_double(s.min) << ',' << format_double(s.max) << ','
                << format_double(s.mean) << ',' << format_double(s.median) << ',' << format_double(s.std) << ','
                << format_double(s.p67) << ',' << format_double(s.p90) << '\n';
        }
    } else {
        char line[256];
        std::snprintf(line, sizeof line, "%-8s %10s %10s %10s %10s %10s %10s %10s  %s\n", "method", "Min", "Max",
                      "Mean", "Median", "Std", "67%", "90%", "altitude_source");
        out << line;
        for (const auto& r : reports) {
            const auto& s = r.stats;
            std::snprintf(line, sizeof line, "%-8s %10s %10s %10s %10s %10s %10s %10s  %s\n", r.method_name.c_str(),
                          fixed4(s.min).c_str(), fixed4(s.max).c_str(), fixed4(s.mean).c_str(),
                          fixed4(s.median).c_str(), fixed4(s.std).c_str(), fixed4(s.p67).c_str(),
                          fixed4(s.p90).c_str(), r.altitude_source.c_str());
            out << line;
        }
    }
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "write failed for " + path.string());

    for (const auto& r : reports) {
        auto cdf = open_for_write(path.parent_path() / (r.method_name + ".cdf.csv"));
        cdf << "error_m,cum_prob\n";
        for (const auto& p : cdf_points(r.errors))
            cdf << format_double(p.error) << ',' << format_double(p.cum_prob) << '\n';
    }
}

} // namespace vpos::eval
