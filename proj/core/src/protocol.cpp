#include "stimrun/protocol.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <nlohmann/json.hpp>

#include "stimrun/error.hpp"
#include "stimrun/text.hpp"

namespace stimrun::wire {

using nlohmann::json;

namespace {

[[noreturn]] void proto(const std::string& why) {
    throw Error(ErrorCode::Proto, why);
}

std::string color_text(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb color_from(const std::string& s) {
    if (s.size() != 7 || s[0] != '#') {
        proto("bad color '" + s + "'");
    }
    unsigned v = 0;
    for (std::size_t i = 1; i < 7; ++i) {
        const char c = s[i];
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') v |= static_cast<unsigned>(c - 'A' + 10);
        else proto("bad color '" + s + "'");
    }
    return Rgb{static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

constexpr std::pair<unsigned, const char*> position_names[] = {
    {HCenter, "HCenter"}, {VCenter, "VCenter"}, {Left, "Left"}, {Right, "Right"}, {Top, "Top"}, {Bottom, "Bottom"}};

json format_json(const TextFormat& f) {
    json pos = json::array();
    for (const auto& [flag, name] : position_names) {
        if (f.position & flag) {
            pos.push_back(name);
        }
    }
    return {{"font", f.font}, {"size", f.size}, {"bkcolor", color_text(f.bkcolor)},
        {"txtcolor", color_text(f.txtcolor)}, {"position", pos}};
}

template <typename T>
T field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) {
        proto(std::string("missing field '") + name + "'");
    }
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) proto(std::string("field '") + name + "' is not a string");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) proto(std::string("field '") + name + "' is not a boolean");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) proto(std::string("field '") + name + "' is not a number");
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned()) proto(std::string("field '") + name + "' is not a non-negative integer");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) proto(std::string("field '") + name + "' is not an integer");
        }
        return it->get<T>();
    } catch (const json::exception& e) {
        proto(std::string("field '") + name + "': " + e.what());
    }
}

TextFormat format_from(const json& j) {
    if (!j.is_object()) {
        proto("format is not an object");
    }
    TextFormat f;
    f.font = field<std::string>(j, "font");
    f.size = field<int>(j, "size");
    f.bkcolor = color_from(field<std::string>(j, "bkcolor"));
    f.txtcolor = color_from(field<std::string>(j, "txtcolor"));
    f.position = PositionNone;
    const auto pos = j.find("position");
    if (pos == j.end() || !pos->is_array()) {
        proto("format.position must be an array");
    }
    for (const auto& p : *pos) {
        bool known = false;
        for (const auto& [flag, name] : position_names) {
            if (p.is_string() && p.get<std::string>() == name) {
                f.position |= flag;
                known = true;
            }
        }
        if (!known) {
            proto("unknown position flag");
        }
    }
    return f;
}

AssetKind kind_from(const std::string& s) {
    if (s == "audio") return AssetKind::Audio;
    if (s == "image") return AssetKind::Image;
    if (s == "text") return AssetKind::Text;
    proto("unknown asset kind '" + s + "'");
}

Phase phase_from(const std::string& s) {
    if (s == "training") return Phase::Training;
    if (s == "test") return Phase::Test;
    proto("unknown phase '" + s + "'");
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::string_view message_type(const Message& msg) {
    return std::visit(overloaded{
                          [](const Hello&) { return "Hello"; },
                          [](const Preload&) { return "Preload"; },
                          [](const TrialStart&) { return "TrialStart"; },
                          [](const TrialEnd&) { return "TrialEnd"; },
                          [](const PresentText&) { return "PresentText"; },
                          [](const PresentImage&) { return "PresentImage"; },
                          [](const Play&) { return "Play"; },
                          [](const Mark&) { return "Mark"; },
                          [](const OpenWindow&) { return "OpenWindow"; },
                          [](const CloseWindow&) { return "CloseWindow"; },
                          [](const SessionEnd&) { return "SessionEnd"; },
                          [](const Refuse&) { return "Refuse"; },
                          [](const Ready&) { return "Ready"; },
                          [](const Onset&) { return "Onset"; },
                          [](const Input&) { return "Input"; },
                          [](const Bye&) { return "Bye"; },
                          [](const Fault&) { return "Fault"; },
                          [](const Calibration&) { return "Calibration"; },
                      },
        msg);
}

std::string encode_message(const Message& msg) {
    json j = std::visit(overloaded{
                            [](const Hello& m) { return json{{"version", m.version}, {"asset_count", m.asset_count}}; },
                            [](const Preload& m) {
                                return json{{"asset", m.asset}, {"kind", asset_kind_name(m.kind)}, {"name", m.name},
                                    {"data", base64_encode(m.data)}};
                            },
                            [](const TrialStart& m) { return json{{"trial", m.trial}, {"phase", phase_name(m.phase)}}; },
                            [](const TrialEnd&) { return json::object(); },
                            [](const PresentText& m) {
                                return json{{"cue", m.cue}, {"text", m.text}, {"format", format_json(m.format)}};
                            },
                            [](const PresentImage& m) { return json{{"cue", m.cue}, {"asset", m.asset}}; },
                            [](const Play& m) {
                                return json{{"cue", m.cue}, {"asset", m.asset}, {"gain", m.gain}, {"first", m.first},
                                    {"last", m.last}};
                            },
                            [](const Mark& m) { return json{{"cue", m.cue}}; },
                            [](const OpenWindow& m) {
                                json j{{"window", m.window}};
                                j["delay_ms"] = m.delay_ms ? json(*m.delay_ms) : json(nullptr);
                                return j;
                            },
                            [](const CloseWindow& m) { return json{{"window", m.window}}; },
                            [](const SessionEnd& m) { return json{{"reason", m.reason}}; },
                            [](const Refuse& m) { return json{{"reason", m.reason}}; },
                            [](const Ready& m) { return json{{"version", m.version}}; },
                            [](const Onset& m) { return json{{"cue", m.cue}, {"client_ts", m.client_ts}}; },
                            [](const Input& m) {
                                return json{{"device", input_device_name(m.device)}, {"code", m.code},
                                    {"client_ts", m.client_ts}};
                            },
                            [](const Bye&) { return json::object(); },
                            [](const Fault& m) { return json{{"code", m.code}, {"detail", m.detail}}; },
                            [](const Calibration& m) { return json{{"output_latency_us", m.output_latency_us}}; },
                        },
        msg);
    j["type"] = message_type(msg);
    try {
        return j.dump();
    } catch (const json::exception& e) {
        proto(std::string("cannot encode ") + std::string(message_type(msg)) + ": " + e.what());
    }
}

Message decode_message(std::string_view bytes) {
    if (trim(bytes).empty()) {
        proto("empty frame");
    }
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        proto(std::string("malformed frame: ") + e.what());
    }
    if (!j.is_object()) {
        proto("frame is not a JSON object");
    }
    const auto type = field<std::string>(j, "type");
    if (type == "Hello") return Hello{field<int>(j, "version"), field<std::uint32_t>(j, "asset_count")};
    if (type == "Preload") {
        auto data = base64_decode(field<std::string>(j, "data"));
        if (!data) {
            proto("Preload data is not base64");
        }
        return Preload{field<std::uint32_t>(j, "asset"), kind_from(field<std::string>(j, "kind")),
            field<std::string>(j, "name"), std::move(*data)};
    }
    if (type == "TrialStart") return TrialStart{field<int>(j, "trial"), phase_from(field<std::string>(j, "phase"))};
    if (type == "TrialEnd") return TrialEnd{};
    if (type == "PresentText") {
        auto it = j.find("format");
        if (it == j.end()) {
            proto("missing field 'format'");
        }
        return PresentText{field<std::uint32_t>(j, "cue"), field<std::string>(j, "text"), format_from(*it)};
    }
    if (type == "PresentImage") return PresentImage{field<std::uint32_t>(j, "cue"), field<std::uint32_t>(j, "asset")};
    if (type == "Play") {
        Play p{field<std::uint32_t>(j, "cue"), field<std::uint32_t>(j, "asset"), field<double>(j, "gain"),
            field<std::int64_t>(j, "first"), field<std::int64_t>(j, "last")};
        if (p.first < 0 || p.last < p.first) {
            proto("Play sample range is inverted");
        }
        return p;
    }
    if (type == "Mark") return Mark{field<std::uint32_t>(j, "cue")};
    if (type == "OpenWindow") {
        OpenWindow w{field<int>(j, "window"), std::nullopt};
        if (auto it = j.find("delay_ms"); it != j.end() && !it->is_null()) {
            w.delay_ms = field<std::int64_t>(j, "delay_ms");
        }
        return w;
    }
    if (type == "CloseWindow") return CloseWindow{field<int>(j, "window")};
    if (type == "SessionEnd") return SessionEnd{field<std::string>(j, "reason")};
    if (type == "Refuse") return Refuse{field<std::string>(j, "reason")};
    if (type == "Ready") return Ready{field<int>(j, "version")};
    if (type == "Onset") return Onset{field<std::uint32_t>(j, "cue"), field<std::int64_t>(j, "client_ts")};
    if (type == "Input") {
        const auto device = parse_input_device(field<std::string>(j, "device"));
        if (!device) {
            proto("unknown input device");
        }
        return Input{*device, field<std::string>(j, "code"), field<std::int64_t>(j, "client_ts")};
    }
    if (type == "Bye") return Bye{};
    if (type == "Fault") return Fault{field<std::string>(j, "code"), field<std::string>(j, "detail")};
    if (type == "Calibration") return Calibration{field<std::int64_t>(j, "output_latency_us")};
    proto("unknown message type '" + type + "'");
}

std::int64_t rt_from_client_timestamps(std::int64_t onset_ts_us, std::int64_t input_ts_us) {
    return compute_rtime(Timestamp::from_us(onset_ts_us), Timestamp::from_us(input_ts_us));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text) {
    if (text.size() % 4 != 0) {
        return std::nullopt;
    }
    std::vector<std::uint8_t> out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) {
        return std::nullopt;
    }
    // EVP_DecodeBlock keeps the bytes produced by '=' padding; drop them.
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

} // namespace stimrun::wire
