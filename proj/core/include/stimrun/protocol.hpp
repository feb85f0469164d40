#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stimrun/assets.hpp"
#include "stimrun/ports.hpp"
#include "stimrun/script.hpp"
#include "stimrun/timing.hpp"

namespace stimrun::wire {

// Wire protocol between the engine and a presentation client.
//
// Each message is one JSON object with a "type" member. Over a raw stream
// connection every message is framed by a 4-byte big-endian length; over a
// WebSocket connection each text frame carries one message.
//
// Handshake: engine sends Hello, then one Preload per asset; the client
// answers Ready once everything is decoded. Presentation commands carry a
// `cue` the client echoes in exactly one Onset, stamped on the client's
// monotonic clock. Client timestamps never mix with engine time.
inline constexpr int protocol_version = 1;

// engine -> client
struct Hello {
    int version = protocol_version;
    std::uint32_t asset_count = 0;
    bool operator==(const Hello&) const = default;
};
struct Preload {
    std::uint32_t asset = 0;
    AssetKind kind = AssetKind::Audio;
    std::string name;
    std::vector<std::uint8_t> data; // original file bytes, base64 on the wire
    bool operator==(const Preload&) const = default;
};
struct TrialStart {
    int trial = 0; // 0 for the instruction screen
    Phase phase = Phase::Test;
    bool operator==(const TrialStart&) const = default;
};
struct TrialEnd {
    bool operator==(const TrialEnd&) const = default;
};
struct PresentText {
    std::uint32_t cue = 0;
    std::string text;
    TextFormat format;
    bool operator==(const PresentText&) const = default;
};
struct PresentImage {
    std::uint32_t cue = 0;
    std::uint32_t asset = 0;
    bool operator==(const PresentImage&) const = default;
};
struct Play {
    std::uint32_t cue = 0;
    std::uint32_t asset = 0;
    double gain = 1.0;
    std::int64_t first = 0; // sample frames, [first, last)
    std::int64_t last = 0;
    bool operator==(const Play&) const = default;
};
// Asks for a bare client timestamp (answered by Onset), used to anchor a
// response window when nothing was presented.
struct Mark {
    std::uint32_t cue = 0;
    bool operator==(const Mark&) const = default;
};
struct OpenWindow {
    int window = 0;
    std::optional<std::int64_t> delay_ms;
    bool operator==(const OpenWindow&) const = default;
};
struct CloseWindow {
    int window = 0;
    bool operator==(const CloseWindow&) const = default;
};
struct SessionEnd {
    std::string reason;
    bool operator==(const SessionEnd&) const = default;
};
struct Refuse {
    std::string reason;
    bool operator==(const Refuse&) const = default;
};

// client -> engine
struct Ready {
    int version = protocol_version;
    bool operator==(const Ready&) const = default;
};
struct Onset {
    std::uint32_t cue = 0;
    std::int64_t client_ts = 0; // microseconds
    bool operator==(const Onset&) const = default;
};
struct Input {
    InputDevice device = InputDevice::Keyboard;
    std::string code;
    std::int64_t client_ts = 0;
    bool operator==(const Input&) const = default;
};
struct Bye {
    bool operator==(const Bye&) const = default;
};
struct Fault {
    std::string code; // e.g. E_ASSET
    std::string detail;
    bool operator==(const Fault&) const = default;
};
// Measured audio output latency of the client, reported once per session.
struct Calibration {
    std::int64_t output_latency_us = 0;
    bool operator==(const Calibration&) const = default;
};

using Message = std::variant<Hello, Preload, TrialStart, TrialEnd, PresentText, PresentImage, Play, Mark, OpenWindow,
    CloseWindow, SessionEnd, Refuse, Ready, Onset, Input, Bye, Fault, Calibration>;

std::string_view message_type(const Message& msg);

/// JSON text of one message. Throws Error(Proto) if a string is not UTF-8.
std::string encode_message(const Message& msg);

/// Throws Error(Proto) on an empty or malformed frame.
Message decode_message(std::string_view bytes);

/// Reaction time from two client-clock stamps; engine/client offset and
/// transport delay cancel. Throws Error(ClockOrder).
std::int64_t rt_from_client_timestamps(std::int64_t onset_ts_us, std::int64_t input_ts_us);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

} // namespace stimrun::wire
