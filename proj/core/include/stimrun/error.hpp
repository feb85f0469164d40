#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stimrun {

// Runtime failures raised outside the parser. Parser problems are reported as
// Diagnostic values instead (see diagnostic.hpp).
enum class ErrorCode {
    AssetMissing,
    Decode,
    GateRange,
    ClockOrder,
    RefRange,
    BadValue,
    NoTraining,
    Io,
    Proto,
    ClientLost,
    Busy,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace stimrun
