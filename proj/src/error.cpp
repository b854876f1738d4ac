#include "vpos/error.hpp"

namespace vpos {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MalformedNumber: return "MalformedNumber";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::MissingRequiredColumn: return "MissingRequiredColumn";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ZeroVarianceFeature: return "ZeroVarianceFeature";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::AltitudeOutOfRange: return "AltitudeOutOfRange";
    case ErrorCode::ClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::InvalidScheme: return "InvalidScheme";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::BadCombination: return "BadCombination";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::NonPositivePressure: return "NonPositivePressure";
    case ErrorCode::AltitudeAboveModelCeiling: return "AltitudeAboveModelCeiling";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MalformedModel: return "MalformedModel";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string_view module, const std::string& message)
    : std::runtime_error(std::string(module) + ": " + std::string(to_string(code)) + ": " + message)
    , code_(code)
    , module_(module)
{
}

} // namespace vpos
