#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stimrun {

// Argument syntax: `#N` refers to the N-th (1-based) column of the current
// trial row, anything else is literal text.
struct Literal {
    std::string text;
    bool operator==(const Literal&) const = default;
};

struct ColumnRef {
    int index = 1;
    bool operator==(const ColumnRef&) const = default;
};

using Arg = std::variant<Literal, ColumnRef>;

struct TrialRow {
    int id = 0;
    std::vector<std::string> columns;
    bool operator==(const TrialRow&) const = default;
};

namespace step {

struct Begin {
    bool operator==(const Begin&) const = default;
};
struct End {
    bool operator==(const End&) const = default;
};
struct DisplayText {
    Arg text;
    bool operator==(const DisplayText&) const = default;
};
struct DisplayImageFile {
    Arg path;
    bool operator==(const DisplayImageFile&) const = default;
};
/// volume in dB relative to the recording; time_begin/time_end in ms of the
/// source file.
struct PlaySound {
    Arg source;
    std::optional<Arg> volume;
    std::optional<Arg> time_begin;
    std::optional<Arg> time_end;
    bool operator==(const PlaySound&) const = default;
};
/// delay in ms; absent means an unbounded response window.
struct GetInput {
    std::optional<Arg> delay;
    bool operator==(const GetInput&) const = default;
};

} // namespace step

using Command = std::variant<step::Begin, step::End, step::DisplayText, step::DisplayImageFile,
    step::PlaySound, step::GetInput>;

struct EventStep {
    int label = 0; // numeric part of XNN
    Command command;
    bool operator==(const EventStep&) const = default;
};

enum class TrialOrder { Fixed, Random };

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

enum PositionFlag : unsigned {
    PositionNone = 0,
    HCenter = 1u << 0,
    VCenter = 1u << 1,
    Left = 1u << 2,
    Right = 1u << 3,
    Top = 1u << 4,
    Bottom = 1u << 5,
};

struct TextFormat {
    std::string font = "Arial";
    int size = 24;
    Rgb bkcolor{0, 0, 0};
    Rgb txtcolor{255, 255, 255};
    unsigned position = HCenter | VCenter;
    bool operator==(const TextFormat&) const = default;
};

enum class KeyDevice { CharacterKey, VirtualKey, ButtonBox };

struct KeyCode {
    KeyDevice device = KeyDevice::CharacterKey;
    std::string code; // suffix after CK_/VK_/BK_

    bool operator==(const KeyCode&) const = default;

    /// "CK_1", "VK_NUMPAD2", "BK_01".
    std::string name() const;
    static std::optional<KeyCode> parse(std::string_view token);
};

struct InputMapping {
    std::string label;
    std::vector<KeyCode> codes;
    bool operator==(const InputMapping&) const = default;
};

enum class FieldKind { Subject, Trial, Response, Error, RTime, Column };

struct FieldToken {
    FieldKind kind = FieldKind::Subject;
    int column = 0; // for FieldKind::Column

    bool operator==(const FieldToken&) const = default;

    /// Canonical token text: "$SUBJECT", "#3", ...
    std::string name() const;
    /// Accepts "$$SUBJECT" as a synonym of "$SUBJECT".
    static std::optional<FieldToken> parse(std::string_view token);
};

struct SoundFeedback {
    std::string positive;
    std::string negative;
    bool operator==(const SoundFeedback&) const = default;
};

std::vector<FieldToken> default_response_format();

struct SettingsGroup {
    std::string name;
    std::optional<std::string> instruction_file;
    std::optional<std::vector<int>> training_order;
    TrialOrder trial_order = TrialOrder::Fixed;
    TextFormat text_format;
    std::vector<InputMapping> input_map;
    std::optional<Arg> correct;
    std::int64_t pause_ms = 0;
    std::vector<FieldToken> response_format = default_response_format();
    std::optional<SoundFeedback> sound_feedback;

    bool operator==(const SettingsGroup&) const = default;
};

// Source positions of parsed constructs, used only for diagnostics. Not part
// of structural equality.
struct SourceMap {
    struct Group {
        int header_line = 1;
        std::map<std::string, int> key_lines;
    };
    int trial_data_line = 0;
    int events_line = 0;
    int last_line = 1;
    std::vector<int> trial_lines; // parallel to Script::trials
    std::vector<int> event_lines; // parallel to Script::events
    std::vector<Group> groups;    // parallel to Script::groups
};

struct Script {
    std::map<std::string, std::string> info;
    std::vector<TrialRow> trials;
    std::vector<EventStep> events; // sorted by label
    std::vector<SettingsGroup> groups;
    SourceMap source;

    bool operator==(const Script& other) const {
        return info == other.info && trials == other.trials && events == other.events
            && groups == other.groups;
    }

    const TrialRow* find_trial(int id) const;
    const SettingsGroup* find_group(std::string_view name) const;
    std::string title() const;
};

} // namespace stimrun
