#include "stimrun/error.hpp"

namespace stimrun {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::AssetMissing: return "E_ASSET_MISSING";
    case ErrorCode::Decode: return "E_DECODE";
    case ErrorCode::GateRange: return "E_GATE_RANGE";
    case ErrorCode::ClockOrder: return "E_CLOCK_ORDER";
    case ErrorCode::RefRange: return "E_REF_RANGE";
    case ErrorCode::BadValue: return "E_BAD_VALUE";
    case ErrorCode::NoTraining: return "E_NO_TRAINING";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Proto: return "E_PROTO";
    case ErrorCode::ClientLost: return "E_CLIENT_LOST";
    case ErrorCode::Busy: return "E_BUSY";
    }
    return "E_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message)
    , code_(code) {
}

} // namespace stimrun
