#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqcv {

/// Failure categories raised by the library. Every thrown seqcv::Error carries one.
enum class ErrorCode {
    Domain,          ///< argument outside the mathematical domain
    Index,           ///< time index out of range
    Validation,      ///< invalid model or process parameters
    Window,          ///< empty kernel window
    Configuration,   ///< inconsistent configuration or grid
    Evaluation,      ///< non-finite objective values
    Nontermination,  ///< stopping rule exceeded its step cap
    Unsupported,     ///< request outside the supported regime
    Diagnostics      ///< degenerate input to a diagnostic
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace seqcv
