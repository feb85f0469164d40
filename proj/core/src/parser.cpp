#include "stimrun/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "stimrun/error.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

std::string_view diag_code_name(DiagCode code) {
    switch (code) {
    case DiagCode::NoSection: return "E_NO_SECTION";
    case DiagCode::BadSection: return "E_BAD_SECTION";
    case DiagCode::Syntax: return "E_SYNTAX";
    case DiagCode::DupTrial: return "E_DUP_TRIAL";
    case DiagCode::NoTrials: return "E_NO_TRIALS";
    case DiagCode::DupGroup: return "E_DUP_GROUP";
    case DiagCode::BadCommand: return "E_BAD_COMMAND";
    case DiagCode::BadModifier: return "E_BAD_MODIFIER";
    case DiagCode::BadSetting: return "E_BAD_SETTING";
    case DiagCode::BadValue: return "E_BAD_VALUE";
    case DiagCode::NoBegin: return "E_NO_BEGIN";
    case DiagCode::NoEnd: return "E_NO_END";
    case DiagCode::MarkerPosition: return "E_MARKER_POS";
    case DiagCode::DupLabel: return "E_DUP_LABEL";
    case DiagCode::RefRange: return "E_REF_RANGE";
    case DiagCode::BadCell: return "E_BAD_CELL";
    case DiagCode::UnknownLine: return "W_UNKNOWN_LINE";
    case DiagCode::UnknownSetting: return "W_UNKNOWN_SETTING";
    case DiagCode::NoGroup: return "W_NO_GROUP";
    case DiagCode::TrainingRef: return "W_TRAINING_REF";
    case DiagCode::CorrectLabel: return "W_CORRECT_LABEL";
    case DiagCode::EventOrder: return "W_EVENT_ORDER";
    case DiagCode::NoInputMap: return "W_NO_INPUT";
    }
    return "E_UNKNOWN";
}

Severity diag_severity(DiagCode code) {
    return diag_code_name(code).front() == 'W' ? Severity::Warning : Severity::Error;
}

Diagnostic Diagnostic::make(DiagCode code, int line, std::string message) {
    return Diagnostic{diag_severity(code), std::max(line, 1), std::move(message), code};
}

std::string Diagnostic::to_string() const {
    std::string out = severity == Severity::Error ? "error " : "warning ";
    out += diag_code_name(code);
    out += ' ';
    out += std::to_string(line);
    out += ' ';
    out += message;
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
        [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

[[noreturn]] void fail(DiagCode code, const std::string& message) {
    throw SyntaxError(code, message);
}

bool is_key_char(char c) {
    return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c))
        || c == '_';
}

bool is_key(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_key_char);
}

bool all_digits(std::string_view s) {
    return !s.empty()
        && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int parse_positive_id(std::string_view digits, std::string_view what) {
    if (!all_digits(digits) || digits.size() > 9) {
        fail(DiagCode::Syntax, std::string(what) + " id must be a positive integer, got '"
                + std::string(digits) + "'");
    }
    const int id = static_cast<int>(*parse_int(digits));
    if (id < 1) {
        fail(DiagCode::Syntax, std::string(what) + " id must be at least 1");
    }
    return id;
}

// Splits `NAME=value` at the first '='.
std::pair<std::string_view, std::string_view> split_entry(std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        fail(DiagCode::Syntax, "expected KEY=value");
    }
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

void require_number(const Arg& arg, bool allow_negative, std::string_view modifier) {
    if (const auto* lit = std::get_if<Literal>(&arg)) {
        const auto value = parse_decimal(lit->text);
        if (!value || (!allow_negative && *value < 0)) {
            fail(DiagCode::BadValue, std::string(modifier) + " expects a "
                    + (allow_negative ? "decimal number" : "non-negative number") + ", got '"
                    + lit->text + "'");
        }
    }
}

std::vector<std::string> groups_or_fail(std::string_view value, DiagCode code, std::string_view what) {
    auto groups = split_angle_groups(value);
    if (!groups) {
        fail(code, "malformed " + std::string(what) + " value '" + std::string(value) + "'");
    }
    return std::move(*groups);
}

// Value of a settings key that holds a single item, written either bare
// (`PAUSE=0`) or bracketed (`PAUSE=<0>`).
std::string single_value(std::string_view value, std::string_view key) {
    value = trim(value);
    if (value.starts_with("<")) {
        auto groups = groups_or_fail(value, DiagCode::BadSetting, key);
        if (groups.size() != 1) {
            fail(DiagCode::BadSetting, std::string(key) + " takes exactly one value");
        }
        return groups.front();
    }
    return std::string(value);
}

std::optional<Rgb> parse_color(std::string_view s) {
    s = trim(s);
    if (s.starts_with("0x") || s.starts_with("0X")) {
        s.remove_prefix(2);
    } else if (s.starts_with("#")) {
        s.remove_prefix(1);
    } else {
        return std::nullopt;
    }
    if (s.size() != 6 || !std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); })) {
        return std::nullopt;
    }
    const auto v = std::stoul(std::string(s), nullptr, 16);
    return Rgb{static_cast<std::uint8_t>((v >> 16) & 0xFF), static_cast<std::uint8_t>((v >> 8) & 0xFF),
        static_cast<std::uint8_t>(v & 0xFF)};
}

std::optional<unsigned> parse_position(std::string_view s) {
    unsigned flags = 0;
    std::size_t start = 0;
    s = trim(s);
    if (iequals(s, "None")) {
        return PositionNone;
    }
    while (start <= s.size()) {
        auto bar = s.find('|', start);
        if (bar == std::string_view::npos) {
            bar = s.size();
        }
        const auto flag = trim(s.substr(start, bar - start));
        if (iequals(flag, "HCenter")) flags |= HCenter;
        else if (iequals(flag, "VCenter")) flags |= VCenter;
        else if (iequals(flag, "Left")) flags |= Left;
        else if (iequals(flag, "Right")) flags |= Right;
        else if (iequals(flag, "Top")) flags |= Top;
        else if (iequals(flag, "Bottom")) flags |= Bottom;
        else return std::nullopt;
        start = bar + 1;
    }
    return flags;
}

// "KEYWORD rest of text" -> {KEYWORD, rest}
std::pair<std::string_view, std::string_view> keyword_split(std::string_view group) {
    group = trim(group);
    auto sp = group.find_first_of(" \t");
    if (sp == std::string_view::npos) {
        return {group, {}};
    }
    return {group.substr(0, sp), trim(group.substr(sp + 1))};
}

TextFormat parse_text_format(std::string_view value, TextFormat fmt) {
    for (const auto& group : groups_or_fail(value, DiagCode::BadSetting, "TEXT_FORMAT")) {
        const auto [kw, rest] = keyword_split(group);
        if (rest.empty()) {
            fail(DiagCode::BadSetting, "TEXT_FORMAT <" + std::string(kw) + "> has no value");
        }
        if (iequals(kw, "FONT")) {
            fmt.font = std::string(rest);
        } else if (iequals(kw, "SIZE")) {
            const auto n = parse_int(rest);
            if (!n || *n < 1 || *n > 10'000) {
                fail(DiagCode::BadSetting, "SIZE must be a positive integer");
            }
            fmt.size = static_cast<int>(*n);
        } else if (iequals(kw, "BKCOLOR") || iequals(kw, "TXTCOLOR")) {
            const auto c = parse_color(rest);
            if (!c) {
                fail(DiagCode::BadSetting, std::string(kw) + " expects 0xRRGGBB");
            }
            (iequals(kw, "BKCOLOR") ? fmt.bkcolor : fmt.txtcolor) = *c;
        } else if (iequals(kw, "POSITION")) {
            const auto p = parse_position(rest);
            if (!p) {
                fail(DiagCode::BadSetting, "unknown POSITION flag in '" + std::string(rest) + "'");
            }
            fmt.position = *p;
        } else {
            fail(DiagCode::BadSetting, "unknown TEXT_FORMAT field '" + std::string(kw) + "'");
        }
    }
    return fmt;
}

std::vector<InputMapping> parse_input_map(std::string_view value) {
    std::vector<InputMapping> map;
    std::set<std::string> labels;
    std::set<std::string> codes;
    for (const auto& group : groups_or_fail(value, DiagCode::BadSetting, "INPUT")) {
        const auto words = split_words(group);
        if (words.size() < 2) {
            fail(DiagCode::BadSetting, "INPUT mapping <" + group + "> needs a label and at least one key code");
        }
        InputMapping mapping{std::string(words[0]), {}};
        if (!labels.insert(mapping.label).second) {
            fail(DiagCode::BadSetting, "INPUT label '" + mapping.label + "' is listed twice");
        }
        for (std::size_t i = 1; i < words.size(); ++i) {
            auto key = KeyCode::parse(words[i]);
            if (!key) {
                fail(DiagCode::BadSetting, "'" + std::string(words[i]) + "' is not a CK_, VK_ or BK_ key code");
            }
            if (!codes.insert(key->name()).second) {
                fail(DiagCode::BadSetting, "key code " + key->name() + " is mapped twice");
            }
            mapping.codes.push_back(std::move(*key));
        }
        map.push_back(std::move(mapping));
    }
    return map;
}

} // namespace

Arg parse_arg(std::string_view text) {
    text = trim(text);
    if (text.size() >= 2 && text.front() == '#' && all_digits(text.substr(1))) {
        const auto n = parse_int(text.substr(1));
        if (!n || *n < 1 || *n > 1'000'000) {
            fail(DiagCode::Syntax, "column reference must be #1 or greater");
        }
        return ColumnRef{static_cast<int>(*n)};
    }
    return Literal{std::string(text)};
}

TrialRow parse_trial_line(std::string_view line) {
    line = trim(line);
    if (!line.starts_with("TRIAL")) {
        fail(DiagCode::Syntax, "trial rows start with TRIAL<n>=");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        fail(DiagCode::Syntax, "missing '=' in trial row");
    }
    TrialRow row;
    row.id = parse_positive_id(trim(line.substr(5, eq - 5)), "TRIAL");
    auto cells = split_angle_groups(line.substr(eq + 1));
    if (!cells) {
        fail(DiagCode::Syntax, "unbalanced <...> columns in TRIAL" + std::to_string(row.id));
    }
    if (cells->empty()) {
        fail(DiagCode::Syntax, "TRIAL" + std::to_string(row.id) + " has no columns");
    }
    row.columns = std::move(*cells);
    return row;
}

EventStep parse_event_line(std::string_view line) {
    line = trim(line);
    if (!line.starts_with("X")) {
        fail(DiagCode::Syntax, "event steps start with X<n>=");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
        fail(DiagCode::Syntax, "missing '=' in event step");
    }
    EventStep step;
    step.label = parse_positive_id(trim(line.substr(1, eq - 1)), "event");

    const auto body = trim(line.substr(eq + 1));
    const auto lt = body.find('<');
    const auto verb = trim(body.substr(0, lt));
    const auto rest = lt == std::string_view::npos ? std::string_view{} : body.substr(lt);

    if (verb == "BEGIN" || verb == "END") {
        if (!trim(rest).empty()) {
            fail(DiagCode::Syntax, std::string(verb) + " takes no arguments");
        }
        step.command = verb == "BEGIN" ? Command{step::Begin{}} : Command{step::End{}};
        return step;
    }
    if (verb == "DISPLAY_TEXT") {
        // The text runs from the first '<' to the last '>', so displayed text
        // may itself contain angle brackets.
        const auto close = rest.rfind('>');
        if (rest.empty() || close == std::string_view::npos || !trim(rest.substr(close + 1)).empty()) {
            fail(DiagCode::Syntax, "DISPLAY_TEXT expects <text>");
        }
        step.command = step::DisplayText{parse_arg(rest.substr(1, close - 1))};
        return step;
    }
    if (verb == "DISPLAY_FILEBMP") {
        auto groups = groups_or_fail(rest, DiagCode::Syntax, "DISPLAY_FILEBMP");
        if (groups.size() != 1 || groups[0].empty()) {
            fail(DiagCode::Syntax, "DISPLAY_FILEBMP expects exactly one <file>");
        }
        step.command = step::DisplayImageFile{parse_arg(groups[0])};
        return step;
    }
    if (verb == "PLAY_SOUND") {
        auto groups = groups_or_fail(rest, DiagCode::Syntax, "PLAY_SOUND");
        if (groups.empty() || groups[0].empty()) {
            fail(DiagCode::Syntax, "PLAY_SOUND expects <file>");
        }
        step::PlaySound play{parse_arg(groups[0]), {}, {}, {}};
        for (std::size_t i = 1; i < groups.size(); ++i) {
            const auto [kw, value] = keyword_split(groups[i]);
            std::optional<Arg>* slot = nullptr;
            if (kw == "VOLUME") slot = &play.volume;
            else if (kw == "TIME_BEGIN") slot = &play.time_begin;
            else if (kw == "TIME_END") slot = &play.time_end;
            else fail(DiagCode::BadModifier, "unknown PLAY_SOUND modifier <" + std::string(kw) + ">");
            if (slot->has_value()) {
                fail(DiagCode::Syntax, "modifier " + std::string(kw) + " given twice");
            }
            if (value.empty()) {
                fail(DiagCode::Syntax, "modifier " + std::string(kw) + " has no value");
            }
            *slot = parse_arg(value);
            require_number(**slot, kw == "VOLUME", kw);
        }
        step.command = std::move(play);
        return step;
    }
    if (verb == "GET_INPUT") {
        auto groups = groups_or_fail(rest, DiagCode::Syntax, "GET_INPUT");
        step::GetInput get;
        for (const auto& g : groups) {
            const auto [kw, value] = keyword_split(g);
            if (kw != "DELAY") {
                fail(DiagCode::BadModifier, "unknown GET_INPUT modifier <" + std::string(kw) + ">");
            }
            if (get.delay || value.empty()) {
                fail(DiagCode::Syntax, "GET_INPUT takes one <DELAY ms>");
            }
            get.delay = parse_arg(value);
            require_number(*get.delay, false, "DELAY");
        }
        step.command = std::move(get);
        return step;
    }
    if (verb.empty() || !is_key(verb)) {
        fail(DiagCode::Syntax, "event step has no command");
    }
    fail(DiagCode::BadCommand, "unknown command '" + std::string(verb) + "'");
}

std::optional<SettingsGroup> parse_settings_entry(
    std::string_view key, std::string_view value, SettingsGroup group) {
    key = trim(key);
    value = trim(value);
    if (key == "INSTRUCTION_FORMAT") {
        auto file = single_value(value, key);
        if (file.empty()) {
            fail(DiagCode::BadSetting, "INSTRUCTION_FORMAT needs a file name");
        }
        group.instruction_file = std::move(file);
    } else if (key == "TRAINING_ORDER") {
        std::vector<int> ids;
        for (auto word : split_words(single_value(value, key))) {
            const auto n = parse_int(word);
            if (!n || *n < 1 || *n > 1'000'000'000 || !all_digits(word)) {
                fail(DiagCode::BadSetting, "TRAINING_ORDER expects trial numbers, got '" + std::string(word) + "'");
            }
            ids.push_back(static_cast<int>(*n));
        }
        group.training_order = std::move(ids);
    } else if (key == "TRIAL_ORDER") {
        const auto v = single_value(value, key);
        if (iequals(v, "RANDOM")) group.trial_order = TrialOrder::Random;
        else if (iequals(v, "FIXED")) group.trial_order = TrialOrder::Fixed;
        else fail(DiagCode::BadSetting, "TRIAL_ORDER is FIXED or RANDOM, got '" + v + "'");
    } else if (key == "TEXT_FORMAT") {
        group.text_format = parse_text_format(value, group.text_format);
    } else if (key == "INPUT") {
        group.input_map = parse_input_map(value);
    } else if (key == "CORRECT") {
        const auto v = single_value(value, key);
        if (v.empty()) {
            fail(DiagCode::BadSetting, "CORRECT needs a value");
        }
        try {
            group.correct = parse_arg(v);
        } catch (const SyntaxError& e) {
            fail(DiagCode::BadSetting, e.what());
        }
    } else if (key == "PAUSE") {
        const auto v = single_value(value, key);
        const auto n = parse_int(v);
        if (!n || *n < 0 || !all_digits(trim(v))) {
            fail(DiagCode::BadSetting, "PAUSE expects a non-negative number of milliseconds");
        }
        group.pause_ms = *n;
    } else if (key == "RESPONSE_FORMAT") {
        std::vector<FieldToken> tokens;
        for (const auto& g : groups_or_fail(value, DiagCode::BadSetting, key)) {
            auto token = FieldToken::parse(g);
            if (!token) {
                fail(DiagCode::BadSetting, "unknown RESPONSE_FORMAT field '" + g + "'");
            }
            tokens.push_back(*token);
        }
        group.response_format = std::move(tokens);
    } else if (key == "SOUND_FEEDBACK") {
        SoundFeedback fb;
        for (const auto& g : groups_or_fail(value, DiagCode::BadSetting, key)) {
            const auto [kw, file] = keyword_split(g);
            if (file.empty()) {
                fail(DiagCode::BadSetting, "SOUND_FEEDBACK <" + g + "> has no file");
            }
            if (iequals(kw, "POSITIVE")) fb.positive = std::string(file);
            else if (iequals(kw, "NEGATIVE")) fb.negative = std::string(file);
            else fail(DiagCode::BadSetting, "SOUND_FEEDBACK expects POSITIVE and NEGATIVE");
        }
        if (fb.positive.empty() || fb.negative.empty()) {
            fail(DiagCode::BadSetting, "SOUND_FEEDBACK needs both POSITIVE and NEGATIVE sounds");
        }
        group.sound_feedback = std::move(fb);
    } else {
        return std::nullopt;
    }
    return group;
}

ParseResult parse_script(std::string_view text) {
    enum class Section { None, Information, TrialData, TrialEvents, Settings, Unknown };

    ParseResult result;
    auto& diags = result.diagnostics;
    Script script;
    Section section = Section::None;
    bool saw_section = false;
    bool reported_preamble = false;
    std::set<int> trial_ids;
    std::vector<std::pair<EventStep, int>> events;

    const auto lines = split_lines(text);
    script.source.last_line = std::max<int>(1, static_cast<int>(lines.size()));

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i) + 1;
        const auto line = trim(lines[i]);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            saw_section = true;
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name == "INFORMATION") {
                section = Section::Information;
            } else if (name == "TRIAL_DATA") {
                section = Section::TrialData;
                if (script.source.trial_data_line == 0) script.source.trial_data_line = lineno;
            } else if (name == "TRIAL_EVENTS") {
                section = Section::TrialEvents;
                if (script.source.events_line == 0) script.source.events_line = lineno;
            } else if (name.starts_with("SETTINGS_") && name.size() > 9) {
                section = Section::Settings;
                const std::string group_name(name.substr(9));
                if (script.find_group(group_name)) {
                    diags.push_back(Diagnostic::make(DiagCode::DupGroup, lineno,
                        "settings group " + group_name + " is defined twice"));
                    section = Section::Unknown;
                } else {
                    SettingsGroup g;
                    g.name = group_name;
                    script.groups.push_back(std::move(g));
                    script.source.groups.push_back({lineno, {}});
                }
            } else {
                diags.push_back(Diagnostic::make(DiagCode::BadSection, lineno,
                    "unknown section [" + std::string(name) + "]"));
                section = Section::Unknown;
            }
            continue;
        }

        try {
            switch (section) {
            case Section::None:
                if (!reported_preamble) {
                    diags.push_back(Diagnostic::make(DiagCode::NoSection, lineno,
                        "content before the first [SECTION] header"));
                    reported_preamble = true;
                }
                break;
            case Section::Unknown:
                break;
            case Section::Information: {
                if (line.find('=') == std::string_view::npos) {
                    diags.push_back(Diagnostic::make(DiagCode::UnknownLine, lineno, "ignored line in [INFORMATION]"));
                    break;
                }
                const auto [key, value] = split_entry(line);
                if (!is_key(key)) {
                    fail(DiagCode::Syntax, "malformed key '" + std::string(key) + "'");
                }
                script.info[std::string(key)] = std::string(value);
                break;
            }
            case Section::TrialData: {
                if (!line.starts_with("TRIAL")) {
                    diags.push_back(Diagnostic::make(DiagCode::UnknownLine, lineno, "ignored line in [TRIAL_DATA]"));
                    break;
                }
                auto row = parse_trial_line(line);
                if (!trial_ids.insert(row.id).second) {
                    diags.push_back(Diagnostic::make(DiagCode::DupTrial, lineno,
                        "TRIAL" + std::to_string(row.id) + " is defined twice"));
                    break;
                }
                script.trials.push_back(std::move(row));
                script.source.trial_lines.push_back(lineno);
                break;
            }
            case Section::TrialEvents: {
                if (!(line.size() > 1 && line.front() == 'X' && line.find('=') != std::string_view::npos)) {
                    diags.push_back(Diagnostic::make(DiagCode::UnknownLine, lineno, "ignored line in [TRIAL_EVENTS]"));
                    break;
                }
                events.emplace_back(parse_event_line(line), lineno);
                break;
            }
            case Section::Settings: {
                auto& group = script.groups.back();
                auto& src = script.source.groups.back();
                if (line.find('=') == std::string_view::npos) {
                    diags.push_back(Diagnostic::make(DiagCode::UnknownLine, lineno,
                        "ignored line in [SETTINGS_" + group.name + "]"));
                    break;
                }
                const auto [key, value] = split_entry(line);
                if (!is_key(key)) {
                    fail(DiagCode::Syntax, "malformed key '" + std::string(key) + "'");
                }
                auto updated = parse_settings_entry(key, value, group);
                if (!updated) {
                    diags.push_back(Diagnostic::make(DiagCode::UnknownSetting, lineno,
                        "unknown setting " + std::string(key)));
                    break;
                }
                group = std::move(*updated);
                src.key_lines[std::string(key)] = lineno;
                break;
            }
            }
        } catch (const SyntaxError& e) {
            diags.push_back(Diagnostic::make(e.code(), lineno, e.what()));
        }
    }

    if (!saw_section && !reported_preamble) {
        diags.push_back(Diagnostic::make(DiagCode::NoSection, 1, "script has no sections"));
    }
    if (saw_section && script.trials.empty()) {
        diags.push_back(Diagnostic::make(DiagCode::NoTrials,
            script.source.trial_data_line > 0 ? script.source.trial_data_line : 1,
            "no TRIAL rows"));
    }

    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].first.label < events[i - 1].first.label) {
            diags.push_back(Diagnostic::make(DiagCode::EventOrder, events[i].second,
                "X" + std::to_string(events[i].first.label) + " appears after a higher label; steps run in label order"));
            break;
        }
    }
    std::stable_sort(events.begin(), events.end(),
        [](const auto& a, const auto& b) { return a.first.label < b.first.label; });
    for (auto& [step, lineno] : events) {
        script.events.push_back(std::move(step));
        script.source.event_lines.push_back(lineno);
    }

    std::stable_sort(diags.begin(), diags.end(),
        [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    if (!has_errors(diags)) {
        result.script = std::move(script);
    }
    return result;
}

std::string resolve_arg(const Arg& arg, const TrialRow& trial) {
    if (const auto* lit = std::get_if<Literal>(&arg)) {
        return lit->text;
    }
    const int index = std::get<ColumnRef>(arg).index;
    if (index < 1 || static_cast<std::size_t>(index) > trial.columns.size()) {
        throw Error(ErrorCode::RefRange, "#" + std::to_string(index) + " exceeds the "
                + std::to_string(trial.columns.size()) + " columns of TRIAL" + std::to_string(trial.id));
    }
    return trial.columns[static_cast<std::size_t>(index) - 1];
}

} // namespace stimrun
