#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vpos {

enum class ErrorCode {
    // data_model
    MalformedNumber,
    CoordinateOutOfRange,
    MissingRequiredColumn,
    FileNotFound,
    EmptyDataset,
    TooFewPoints,
    // preprocess
    ZeroVarianceFeature,
    DimensionMismatch,
    // outlier
    TraceTooShort,
    // quantizer
    AltitudeOutOfRange,
    ClassOutOfRange,
    InvalidScheme,
    // mlr / svm
    LabelOutOfRange,
    DegenerateData,
    DidNotConverge,
    // wmlr
    BadCombination,
    EmptyEnsemble,
    IndexMismatch,
    // synthetic
    NonPositivePressure,
    AltitudeAboveModelCeiling,
    InvalidConfig,
    // eval / io
    EmptySequence,
    IoFailure,
    MalformedModel,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a typed code and the module that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string_view module, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorCode code_;
    std::string module_;
};

} // namespace vpos
