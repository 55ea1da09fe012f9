#include "ngrc/error.hpp"

namespace ngrc {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::RowCountMismatch: return "RowCountMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::UnsupportedAxes: return "UnsupportedAxes";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::EmptyConfig: return "EmptyConfig";
    case ErrorCode::HeterogeneousWindows: return "HeterogeneousWindows";
    case ErrorCode::UnknownFeatureSet: return "UnknownFeatureSet";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::MissingWeight: return "MissingWeight";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::NonFiniteScores: return "NonFiniteScores";
    case ErrorCode::InvalidDegree: return "InvalidDegree";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ZeroSpectralRadius: return "ZeroSpectralRadius";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile:
    case ErrorCode::RowCountMismatch:
    case ErrorCode::MalformedRow:
    case ErrorCode::BadLabel:
    case ErrorCode::EmptyDataset:
    case ErrorCode::InvalidWindow:
    case ErrorCode::HeterogeneousWindows:
    case ErrorCode::Io:
        return ErrorClass::Data;
    case ErrorCode::SingularSystem:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::NonFiniteScores:
    case ErrorCode::NonConvergence:
    case ErrorCode::ZeroSpectralRadius:
    case ErrorCode::NonFiniteState:
        return ErrorClass::Numeric;
    default:
        return ErrorClass::Config;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
{
}

void raise(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace ngrc
