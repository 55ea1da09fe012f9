#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ngrc {

enum class ErrorCode {
    // ingestion
    MissingFile,
    RowCountMismatch,
    MalformedRow,
    BadLabel,
    EmptyDataset,
    InvalidWindow,
    // features
    UnsupportedAxes,
    DegenerateWindow,
    EmptyConfig,
    HeterogeneousWindows,
    UnknownFeatureSet,
    UnknownFamily,
    MissingWeight,
    // readout
    LabelOutOfRange,
    DimensionMismatch,
    SingularSystem,
    NonFiniteInput,
    LayoutMismatch,
    NonFiniteScores,
    // reservoir
    InvalidDegree,
    InvalidProbability,
    InvalidSpec,
    NonConvergence,
    ZeroSpectralRadius,
    NonFiniteState,
    // metrics
    LengthMismatch,
    EmptyMatrix,
    // harness
    InvalidConfig,
    Io,
};

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorClass { Config, Data, Numeric };

std::string_view to_string(ErrorCode code) noexcept;
ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    ErrorClass error_class() const noexcept { return classify(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

} // namespace ngrc
