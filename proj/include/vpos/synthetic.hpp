#pragma once

#include "vpos/data_model.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace vpos::synth {

/// Standard-atmosphere altitude in meters for a pressure in pascals:
/// h = 44330.8 - 4946.54 p^0.1902632. Throws NonPositivePressure.
double barometric_altitude(double pressure_pa);

/// Inverse of barometric_altitude. Throws AltitudeAboveModelCeiling for
/// h >= 44330.8.
double inverse_barometric_pressure(double altitude_m);

inline constexpr double kPascalsPerHectopascal = 100.0;

struct SynthConfig {
    int n_devices = 50;
    int points_per_device = 200;
    double altitude_low = 0.0;   // m
    double altitude_high = 80.0; // m
    /// Share of the altitude span explained by a ground surface tilted across
    /// the area; the rest is per-device height above ground.
    double terrain_relief = 70.0; // m
    double pressure_noise_sd = 0.05;       // hPa
    double altitude_noise_sd = 2.0;        // m
    double device_pressure_bias_sd = 0.2;  // hPa
    double outlier_fraction = 0.02;
    double outlier_offset = 30.0; // m
    double speed_low = 0.0;       // m/s
    double speed_high = 26.0;     // m/s
    double sample_interval = 5.0; // s
    double center_longitude = 121.5767;
    double center_latitude = 31.2595;
    double half_width_longitude = 0.0056;
    double half_width_latitude = 0.0044;
    double start_time = 1538697600.0; // 2018-10-05T00:00:00Z
    double time_span = 81.0 * 86400.0;
    std::uint64_t seed = kDefaultSeed;

    /// Throws InvalidConfig.
    void validate() const;
};

struct GroundTruth {
    std::vector<double> true_altitude;
    std::vector<bool> is_outlier;
};

struct SynthResult {
    Dataset dataset;
    GroundTruth truth;
    std::vector<double> device_bias_hpa; // per device, in emission order
};

/// Device-by-device random-walk traces in a lon/lat box. Pressure (hPa) is
/// the barometric inverse of the true altitude plus a per-device bias and
/// per-point noise; the recorded altitude is the true altitude plus noise.
/// Injected outliers have their altitude displaced by +/-outlier_offset and
/// are moved far enough from their trace to exceed its d_max against every
/// regular point.
SynthResult generate_dataset(const SynthConfig& config);

/// CSV `index,true_altitude,is_outlier`.
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_ground_truth(const std::filesystem::path& path);

} // namespace vpos::synth
