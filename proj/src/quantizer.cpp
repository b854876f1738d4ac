#include "vpos/quantizer.hpp"

#include "vpos/data_model.hpp"
#include "vpos/error.hpp"

#include <algorithm>
#include <cmath>

namespace vpos {

namespace {
constexpr std::string_view kModule = "quantizer";
}

QuantizationScheme::QuantizationScheme(double h_min, double h_max, double delta)
    : h_min_(h_min)
    , h_max_(h_max)
    , delta_(delta)
    , num_classes_(0)
{
    if (!std::isfinite(h_min) || !std::isfinite(h_max) || !(h_min < h_max))
        throw Error(ErrorCode::InvalidScheme, kModule,
                    "need h_min < h_max, got [" + format_double(h_min) + ", " + format_double(h_max) + "]");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw Error(ErrorCode::InvalidScheme, kModule, "quantization step must be positive");
    num_classes_ = static_cast<int>(std::ceil((h_max - h_min) / delta)) + 1;
}

QuantizationScheme QuantizationScheme::from_altitudes(std::span<const double> altitudes, double delta)
{
    if (altitudes.empty())
        throw Error(ErrorCode::InvalidScheme, kModule, "no altitudes to span");
    const auto [lo, hi] = std::minmax_element(altitudes.begin(), altitudes.end());
    return QuantizationScheme(*lo, *hi, delta);
}

int QuantizationScheme::class_of(double h) const
{
    if (!(h >= h_min_ && h <= h_max_))
        throw Error(ErrorCode::AltitudeOutOfRange, kModule,
                    format_double(h) + " m outside [" + format_double(h_min_) + ", " + format_double(h_max_) + "]");
    const int k = static_cast<int>(std::ceil((h - h_min_) / delta_));
    return std::clamp(k, 1, num_classes_);
}

double QuantizationScheme::predicted_altitude(int k) const
{
    if (k < 1 || k > num_classes_)
        throw Error(ErrorCode::ClassOutOfRange, kModule,
                    "class " + std::to_string(k) + " outside [1, " + std::to_string(num_classes_) + "]");
    return (k - 0.5) * delta_ + h_min_;
}

} // namespace vpos
