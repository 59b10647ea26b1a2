#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spdsliced {

enum class ErrorCode {
    InvalidArgument,
    NotPositiveDefinite,
    DimensionMismatch,
    Overflow,
    NotUnitNorm,
    DegenerateDirection,
    DegenerateSample,
    EmptyMeasure,
    InstanceTooLarge,
    NotConverged,
    BasisMismatch,
    SizeMismatch,
    IllConditioned,
    SingularFeatures,
    MissingLabels,
    InvalidData,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::NotUnitNorm: return "NotUnitNorm";
        case ErrorCode::DegenerateDirection: return "DegenerateDirection";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::EmptyMeasure: return "EmptyMeasure";
        case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::BasisMismatch: return "BasisMismatch";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::SingularFeatures: return "SingularFeatures";
        case ErrorCode::MissingLabels: return "MissingLabels";
        case ErrorCode::InvalidData: return "InvalidData";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string &what) {
    if (!condition) throw Error(code, what);
}

}  // namespace spdsliced
