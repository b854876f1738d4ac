#pragma once

#include <span>

namespace vpos {

/// Uniform altitude bins of width `delta` starting at `h_min`.
///
/// Class k (1-based) covers (h_min + (k-1) delta, h_min + k delta], with
/// h_min itself assigned to class 1. The predicted altitude of a class is
/// the center of its interval.
class QuantizationScheme {
public:
    /// Throws InvalidScheme unless h_min < h_max and delta > 0.
    QuantizationScheme(double h_min, double h_max, double delta);

    /// Scheme spanning the given altitudes.
    static QuantizationScheme from_altitudes(std::span<const double> altitudes, double delta);

    double h_min() const { return h_min_; }
    double h_max() const { return h_max_; }
    double delta() const { return delta_; }
    /// ceil((h_max - h_min) / delta) + 1.
    int num_classes() const { return num_classes_; }

    /// Throws AltitudeOutOfRange outside [h_min, h_max].
    int class_of(double h) const;
    /// (k - 1/2) delta + h_min. Throws ClassOutOfRange outside [1, K].
    double predicted_altitude(int k) const;

    bool operator==(const QuantizationScheme&) const = default;

private:
    double h_min_;
    double h_max_;
    double delta_;
    int num_classes_;
};

} // namespace vpos
