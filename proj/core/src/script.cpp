#include "stimrun/script.hpp"

#include "stimrun/text.hpp"

namespace stimrun {

std::string KeyCode::name() const {
    switch (device) {
    case KeyDevice::CharacterKey: return "CK_" + code;
    case KeyDevice::VirtualKey: return "VK_" + code;
    case KeyDevice::ButtonBox: return "BK_" + code;
    }
    return code;
}

std::optional<KeyCode> KeyCode::parse(std::string_view token) {
    token = trim(token);
    if (token.size() < 4 || token[2] != '_') {
        return std::nullopt;
    }
    const auto prefix = token.substr(0, 2);
    KeyCode key;
    if (prefix == "CK") {
        key.device = KeyDevice::CharacterKey;
    } else if (prefix == "VK") {
        key.device = KeyDevice::VirtualKey;
    } else if (prefix == "BK") {
        key.device = KeyDevice::ButtonBox;
    } else {
        return std::nullopt;
    }
    key.code = std::string(token.substr(3));
    return key;
}

std::string FieldToken::name() const {
    switch (kind) {
    case FieldKind::Subject: return "$SUBJECT";
    case FieldKind::Trial: return "$TRIAL";
    case FieldKind::Response: return "$RESPONSE";
    case FieldKind::Error: return "$ERROR";
    case FieldKind::RTime: return "$RTIME";
    case FieldKind::Column: return "#" + std::to_string(column);
    }
    return {};
}

std::optional<FieldToken> FieldToken::parse(std::string_view token) {
    token = trim(token);
    if (token.starts_with("#")) {
        const auto n = parse_int(token.substr(1));
        if (!n || *n < 1 || *n > 1'000'000 || token.size() < 2 || token[1] == '+' || token[1] == '-') {
            return std::nullopt;
        }
        return FieldToken{FieldKind::Column, static_cast<int>(*n)};
    }
    if (token.starts_with("$$")) {
        token.remove_prefix(1);
    }
    if (token == "$SUBJECT") return FieldToken{FieldKind::Subject, 0};
    if (token == "$TRIAL") return FieldToken{FieldKind::Trial, 0};
    if (token == "$RESPONSE") return FieldToken{FieldKind::Response, 0};
    if (token == "$ERROR") return FieldToken{FieldKind::Error, 0};
    if (token == "$RTIME") return FieldToken{FieldKind::RTime, 0};
    return std::nullopt;
}

std::vector<FieldToken> default_response_format() {
    return {{FieldKind::Subject, 0}, {FieldKind::Trial, 0}, {FieldKind::Response, 0},
        {FieldKind::Error, 0}, {FieldKind::RTime, 0}};
}

const TrialRow* Script::find_trial(int id) const {
    for (const auto& t : trials) {
        if (t.id == id) {
            return &t;
        }
    }
    return nullptr;
}

const SettingsGroup* Script::find_group(std::string_view name) const {
    for (const auto& g : groups) {
        if (iequals(g.name, name)) {
            return &g;
        }
    }
    return nullptr;
}

std::string Script::title() const {
    auto it = info.find("TITLE");
    return it == info.end() ? std::string{} : it->second;
}

} // namespace stimrun
