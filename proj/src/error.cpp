#include "seqcv/error.hpp"

namespace seqcv {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Domain: return "domain error";
        case ErrorCode::Index: return "index error";
        case ErrorCode::Validation: return "validation error";
        case ErrorCode::Window: return "window error";
        case ErrorCode::Configuration: return "configuration error";
        case ErrorCode::Evaluation: return "evaluation error";
        case ErrorCode::Nontermination: return "nontermination error";
        case ErrorCode::Unsupported: return "unsupported";
        case ErrorCode::Diagnostics: return "diagnostics error";
    }
    return "error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace seqcv
