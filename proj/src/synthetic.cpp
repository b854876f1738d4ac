#include "vpos/synthetic.hpp"

#include "vpos/geo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vpos::synth {

namespace {

constexpr std::string_view kModule = "synthetic";
constexpr double kOffset = 44330.8;
constexpr double kScale = 4946.54;
constexpr double kExponent = 0.1902632;

double reflect(double v, double lo, double hi)
{
    // Bounces a value back into [lo, hi]; steps are small relative to the box.
    for (int i = 0; i < 8 && (v < lo || v > hi); ++i) {
        if (v < lo)
            v = 2.0 * lo - v;
        if (v > hi)
            v = 2.0 * hi - v;
    }
    return std::clamp(v, lo, hi);
}

std::string device_name(int d)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%04d", d + 1);
    return buf;
}

} // namespace

double barometric_altitude(double pressure_pa)
{
    if (!(pressure_pa > 0.0))
        throw Error(ErrorCode::NonPositivePressure, kModule, "pressure must be positive, got " + format_double(pressure_pa));
    return kOffset - kScale * std::pow(pressure_pa, kExponent);
}

double inverse_barometric_pressure(double altitude_m)
{
    if (!(altitude_m < kOffset))
        throw Error(ErrorCode::AltitudeAboveModelCeiling, kModule,
                    format_double(altitude_m) + " m is at or above the model ceiling");
    return std::pow((kOffset - altitude_m) / kScale, 1.0 / kExponent);
}

void SynthConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, kModule, msg); };
    if (n_devices < 1 || points_per_device < 1)
        fail("need at least one device and one point per device");
    if (!(altitude_low < altitude_high))
        fail("altitude range is empty");
    if (terrain_relief < 0.0 || terrain_relief > altitude_high - altitude_low)
        fail("terrain relief must lie within the altitude span");
    if (pressure_noise_sd < 0.0 || altitude_noise_sd < 0.0 || device_pressure_bias_sd < 0.0)
        fail("standard deviations must be non-negative");
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
        fail("outlier fraction must lie in [0, 1)");
    if (outlier_offset < 0.0)
        fail("outlier offset must be non-negative");
    if (!(speed_low >= 0.0 && speed_low <= speed_high))
        fail("speed range is invalid");
    if (!(sample_interval > 0.0))
        fail("sample interval must be positive");
    if (!(half_width_longitude > 0.0 && half_width_latitude > 0.0))
        fail("area half widths must be positive");
}

SynthResult generate_dataset(const SynthConfig& config)
{
    config.validate();
    Rng rng(config.seed);
    const geo::EarthModel earth;

    SynthResult out;
    out.dataset.provenance = "synthetic";
    const auto total = static_cast<std::size_t>(config.n_devices) * static_cast<std::size_t>(config.points_per_device);
    out.dataset.points.reserve(total);
    out.truth.true_altitude.reserve(total);
    out.truth.is_outlier.reserve(total);

    const double lon_lo = config.center_longitude - config.half_width_longitude;
    const double lon_hi = config.center_longitude + config.half_width_longitude;
    const double lat_lo = config.center_latitude - config.half_width_latitude;
    const double lat_hi = config.center_latitude + config.half_width_latitude;
    const double meters_per_deg_lat = earth.radius_m * geo::kPi / 180.0;
    const double height_hi = config.altitude_high - config.terrain_relief;
    const double min_moving_speed = std::max(config.speed_low, std::min(0.5, config.speed_high));

    // Ground rises linearly along a fixed bearing across the box.
    auto ground = [&](double lon, double lat) {
        const double u = (lon - lon_lo) / (lon_hi - lon_lo);
        const double v = (lat - lat_lo) / (lat_hi - lat_lo);
        return config.altitude_low + config.terrain_relief * 0.5 * (u + v);
    };

    for (int d = 0; d < config.n_devices; ++d) {
        const std::string id = device_name(d);
        const double bias = rng.normal(0.0, config.device_pressure_bias_sd);
        out.device_bias_hpa.push_back(bias);

        const double t0 = config.start_time + std::floor(rng.uniform(0.0, config.time_span));
        double lon = rng.uniform(lon_lo, lon_hi);
        double lat = rng.uniform(lat_lo, lat_hi);
        double heading = rng.uniform(0.0, 2.0 * geo::kPi);
        const double u = rng.uniform();
        const double typical_speed = config.speed_low + (config.speed_high - config.speed_low) * u * u;
        double height = rng.uniform(0.0, height_hi - config.altitude_low);

        const auto n = static_cast<std::size_t>(config.points_per_device);
        std::vector<Observation> trace(n);
        std::vector<double> truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& obs = trace[i];
            obs.device_id = id;
            obs.time = t0 + static_cast<double>(i) * config.sample_interval;
            const double speed = std::clamp(typical_speed + rng.normal(), min_moving_speed, config.speed_high);
            obs.speed = speed;
            if (i > 0) {
                // Displacement covers the previous interval at the previous speed.
                heading += rng.normal(0.0, 0.4);
                const double dist = *trace[i - 1].speed * config.sample_interval;
                const double dlat = dist * std::cos(heading) / meters_per_deg_lat;
                const double dlon = dist * std::sin(heading) / (meters_per_deg_lat * std::cos(geo::deg_to_rad(lat)));
                lon = reflect(lon + dlon, lon_lo, lon_hi);
                lat = reflect(lat + dlat, lat_lo, lat_hi);
                height = reflect(height + rng.normal(0.0, 0.3), 0.0, height_hi - config.altitude_low);
            }
            obs.longitude = lon;
            obs.latitude = lat;
            truth[i] = std::clamp(ground(lon, lat) + height, config.altitude_low, config.altitude_high);
            obs.pressure = inverse_barometric_pressure(truth[i]) / kPascalsPerHectopascal + bias
                + rng.normal(0.0, config.pressure_noise_sd);
            obs.altitude = truth[i] + rng.normal(0.0, config.altitude_noise_sd);
        }

        // Threshold the outlier vote will use, and the trace's extent around its centroid.
        double speed_sum = 0.0;
        double c_lon = 0.0, c_lat = 0.0;
        for (const auto& obs : trace) {
            speed_sum += *obs.speed;
            c_lon += obs.longitude;
            c_lat += obs.latitude;
        }
        c_lon /= static_cast<double>(n);
        c_lat /= static_cast<double>(n);
        const double d_max = geo::diameter_threshold(speed_sum / static_cast<double>(n),
                                                     trace.back().time - trace.front().time);
        double radius = 0.0;
        for (const auto& obs : trace)
            radius = std::max(radius, geo::haversine_distance({c_lon, c_lat}, {obs.longitude, obs.latitude}, earth));

        std::vector<bool> flagged(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            if (!rng.bernoulli(config.outlier_fraction))
                continue;
            flagged[i] = true;
            auto& obs = trace[i];
            const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
            obs.altitude = truth[i] + sign * config.outlier_offset;
            const double jump = d_max + radius + 500.0;
            const double bearing = rng.uniform(0.0, 2.0 * geo::kPi);
            obs.latitude = c_lat + jump * std::cos(bearing) / meters_per_deg_lat;
            obs.longitude = c_lon + jump * std::sin(bearing) / (meters_per_deg_lat * std::cos(geo::deg_to_rad(c_lat)));
        }

        for (std::size_t i = 0; i < n; ++i) {
            out.dataset.points.push_back(std::move(trace[i]));
            out.truth.true_altitude.push_back(truth[i]);
            out.truth.is_outlier.push_back(flagged[i]);
        }
    }
    return out;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "cannot write " + path.string());
    out << "index,true_altitude,is_outlier\n";
    for (std::size_t i = 0; i < truth.true_altitude.size(); ++i)
        out << i << ',' << format_double(truth.true_altitude[i]) << ',' << (truth.is_outlier[i] ? 1 : 0) << '\n';
}

GroundTruth read_ground_truth(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::FileNotFound, kModule, "cannot open " + path.string());
    GroundTruth truth;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string index, altitude, flag;
        std::getline(ss, index, ',');
        std::getline(ss, altitude, ',');
        std::getline(ss, flag, ',');
        try {
            truth.true_altitude.push_back(std::stod(altitude));
        } catch (const std::exception&) {
            throw Error(ErrorCode::MalformedNumber, kModule, "bad ground-truth line: " + line);
        }
        truth.is_outlier.push_back(flag.rfind('1', 0) == 0);
    }
    return truth;
}

} // namespace vpos::synth
