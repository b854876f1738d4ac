#include "vpos/geo.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace vpos::geo {

double haversine_distance(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth)
{
    // Order the operands so that (a, b) and (b, a) run the same arithmetic.
    const bool swap = std::tie(a.longitude, a.latitude) > std::tie(b.longitude, b.latitude);
    const GeoPoint& p = swap ? b : a;
    const GeoPoint& q = swap ? a : b;

    const double lat_p = deg_to_rad(p.latitude);
    const double lat_q = deg_to_rad(q.latitude);
    const double sin_dlat = std::sin(deg_to_rad(q.latitude - p.latitude) / 2.0);
    const double sin_dlon = std::sin(deg_to_rad(q.longitude - p.longitude) / 2.0);
    const double h = sin_dlat * sin_dlat + std::cos(lat_p) * std::cos(lat_q) * sin_dlon * sin_dlon;
    // Rounding can push h slightly above 1 for antipodes.
    return 2.0 * earth.radius_m * std::asin(std::min(1.0, std::sqrt(std::fabs(h))));
}

ChordDistances chord_distances(const GeoPoint& a, const GeoPoint& b, const EarthModel& earth)
{
    const double half = std::fabs(std::sin(deg_to_rad(b.longitude - a.longitude) / 2.0));
    return {2.0 * earth.radius_m * half * std::cos(deg_to_rad(a.latitude)),
            2.0 * earth.radius_m * half * std::cos(deg_to_rad(b.latitude))};
}

double diameter_threshold(double mean_speed, double duration)
{
    return mean_speed * duration;
}

} // namespace vpos::geo
