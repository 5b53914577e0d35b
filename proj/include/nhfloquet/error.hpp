#pragma once

#include <stdexcept>
#include <string>

namespace nhfloquet {

enum class ErrorCode {
    AtExceptionalPoint,
    NoConvergence,
    SeriesNoConvergence,
    IntegerBParameter,
    DegenerateParameter,
    IntegerOrder,
    ArgumentOutOfRange,
    StepSizeUnderflow,
    LowerTriangularPoint,
    JordanBlock,
    UnsupportedFamily,
    UnsupportedHarmonics,
    BranchPointOnCircle,
    AmbiguousFollowing,
    NoTangency,
    NoBifurcation,
    ConfigError,
};

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::AtExceptionalPoint: return "AtExceptionalPoint";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SeriesNoConvergence: return "SeriesNoConvergence";
        case ErrorCode::IntegerBParameter: return "IntegerBParameter";
        case ErrorCode::DegenerateParameter: return "DegenerateParameter";
        case ErrorCode::IntegerOrder: return "IntegerOrder";
        case ErrorCode::ArgumentOutOfRange: return "ArgumentOutOfRange";
        case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorCode::LowerTriangularPoint: return "LowerTriangularPoint";
        case ErrorCode::JordanBlock: return "JordanBlock";
        case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
        case ErrorCode::UnsupportedHarmonics: return "UnsupportedHarmonics";
        case ErrorCode::BranchPointOnCircle: return "BranchPointOnCircle";
        case ErrorCode::AmbiguousFollowing: return "AmbiguousFollowing";
        case ErrorCode::NoTangency: return "NoTangency";
        case ErrorCode::NoBifurcation: return "NoBifurcation";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nhfloquet
