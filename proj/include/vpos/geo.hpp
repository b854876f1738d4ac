#pragma once

namespace vpos::geo {

inline constexpr double kPi = 3.14159265358979323846;

/// Longitude/latitude in degrees.
struct GeoPoint {
    double longitude = 0.0;
    double latitude = 0.0;
};

/// Spherical Earth. The default is the IUGG mean radius.
struct EarthModel {
    double radius_m = 6371008.8;
};

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }

/// Great-circle distance in meters (haversine form). Symmetric in a and b.
double haversine_distance(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth = {});

/// Auxiliary chords along the two parallels: 2R sin(dlon/2) cos(lat_a) and
/// 2R sin(dlon/2) cos(lat_b). Sign of dlon is dropped.
struct ChordDistances {
    double along_a = 0.0; // d_AD
    double along_b = 0.0; // d_CB
};
ChordDistances chord_distances(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth = {});

/// Trace diameter threshold: mean speed times measuring time.
double diameter_threshold(double mean_speed, double duration);

} // namespace vpos::geo
