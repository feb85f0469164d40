#include <algorithm>
#include <set>

#include "stimrun/parser.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

namespace {

struct RefUse {
    int index;
    int line;
    std::string where;
};

void collect_refs(const Arg& arg, int line, std::string where, std::vector<RefUse>& out) {
    if (const auto* ref = std::get_if<ColumnRef>(&arg)) {
        out.push_back({ref->index, line, std::move(where)});
    }
}

void collect_refs(const std::optional<Arg>& arg, int line, std::string where, std::vector<RefUse>& out) {
    if (arg) {
        collect_refs(*arg, line, std::move(where), out);
    }
}

int line_at(const std::vector<int>& lines, std::size_t i, int fallback) {
    return i < lines.size() ? lines[i] : fallback;
}

} // namespace

std::vector<Diagnostic> validate_script(const Script& script) {
    std::vector<Diagnostic> out;
    const auto& src = script.source;
    const int events_line = src.events_line > 0 ? src.events_line : src.last_line;

    // Program shape.
    const auto& events = script.events;
    if (events.empty()) {
        out.push_back(Diagnostic::make(DiagCode::NoBegin, events_line, "event program is empty"));
        out.push_back(Diagnostic::make(DiagCode::NoEnd, events_line, "event program is empty"));
    } else {
        if (!std::holds_alternative<step::Begin>(events.front().command)) {
            out.push_back(Diagnostic::make(DiagCode::NoBegin, line_at(src.event_lines, 0, events_line),
                "first step X" + std::to_string(events.front().label) + " is not BEGIN"));
        }
        if (!std::holds_alternative<step::End>(events.back().command)) {
            out.push_back(Diagnostic::make(DiagCode::NoEnd,
                line_at(src.event_lines, events.size() - 1, events_line),
                "last step X" + std::to_string(events.back().label) + " is not END"));
        }
        for (std::size_t i = 0; i < events.size(); ++i) {
            const bool marker = std::holds_alternative<step::Begin>(events[i].command)
                || std::holds_alternative<step::End>(events[i].command);
            const bool edge = (i == 0 && std::holds_alternative<step::Begin>(events[i].command))
                || (i + 1 == events.size() && std::holds_alternative<step::End>(events[i].command));
            if (marker && !edge) {
                out.push_back(Diagnostic::make(DiagCode::MarkerPosition, line_at(src.event_lines, i, events_line),
                    "X" + std::to_string(events[i].label) + ": BEGIN must be first and END last, once each"));
            }
            if (i > 0 && events[i].label == events[i - 1].label) {
                out.push_back(Diagnostic::make(DiagCode::DupLabel, line_at(src.event_lines, i, events_line),
                    "label X" + std::to_string(events[i].label) + " is used twice"));
            }
        }
    }

    // Cells.
    for (std::size_t t = 0; t < script.trials.size(); ++t) {
        for (const auto& cell : script.trials[t].columns) {
            if (cell.find_first_of("\t\n\r") != std::string::npos) {
                out.push_back(Diagnostic::make(DiagCode::BadCell, line_at(src.trial_lines, t, 1),
                    "TRIAL" + std::to_string(script.trials[t].id) + " has a cell containing a tab or newline"));
                break;
            }
        }
    }

    // Column references against the narrowest row.
    std::size_t min_columns = 0;
    if (!script.trials.empty()) {
        min_columns = std::min_element(script.trials.begin(), script.trials.end(),
            [](const TrialRow& a, const TrialRow& b) { return a.columns.size() < b.columns.size(); })
                          ->columns.size();
    }
    std::vector<RefUse> refs;
    bool uses_input = false;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const int line = line_at(src.event_lines, i, events_line);
        const auto where = "X" + std::to_string(events[i].label);
        std::visit([&](const auto& cmd) {
            using T = std::decay_t<decltype(cmd)>;
            if constexpr (std::is_same_v<T, step::DisplayText>) {
                collect_refs(cmd.text, line, where, refs);
            } else if constexpr (std::is_same_v<T, step::DisplayImageFile>) {
                collect_refs(cmd.path, line, where, refs);
            } else if constexpr (std::is_same_v<T, step::PlaySound>) {
                collect_refs(cmd.source, line, where, refs);
                collect_refs(cmd.volume, line, where, refs);
                collect_refs(cmd.time_begin, line, where, refs);
                collect_refs(cmd.time_end, line, where, refs);
            } else if constexpr (std::is_same_v<T, step::GetInput>) {
                uses_input = true;
                collect_refs(cmd.delay, line, where, refs);
            }
        }, events[i].command);
    }
    for (std::size_t g = 0; g < script.groups.size(); ++g) {
        const auto& group = script.groups[g];
        const auto& gsrc = g < src.groups.size() ? src.groups[g] : SourceMap::Group{};
        auto key_line = [&](const char* key) {
            auto it = gsrc.key_lines.find(key);
            return it == gsrc.key_lines.end() ? gsrc.header_line : it->second;
        };
        collect_refs(group.correct, key_line("CORRECT"), "CORRECT", refs);
        for (const auto& token : group.response_format) {
            if (token.kind == FieldKind::Column) {
                refs.push_back({token.column, key_line("RESPONSE_FORMAT"), "RESPONSE_FORMAT"});
            }
        }
    }
    for (const auto& ref : refs) {
        if (static_cast<std::size_t>(ref.index) > min_columns) {
            out.push_back(Diagnostic::make(DiagCode::RefRange, ref.line,
                ref.where + ": #" + std::to_string(ref.index) + " exceeds the "
                    + std::to_string(min_columns) + " columns available in every trial"));
        }
    }

    // Numeric modifiers given as column references must resolve to numbers
    // in every trial.
    auto check_numeric = [&](const std::optional<Arg>& arg, bool allow_negative, const char* what, int step_line) {
        if (!arg || !std::holds_alternative<ColumnRef>(*arg)) {
            return;
        }
        const auto index = static_cast<std::size_t>(std::get<ColumnRef>(*arg).index);
        for (std::size_t t = 0; t < script.trials.size(); ++t) {
            const auto& row = script.trials[t];
            if (index > row.columns.size()) {
                continue;
            }
            const auto value = parse_decimal(row.columns[index - 1]);
            if (!value || (!allow_negative && *value < 0)) {
                out.push_back(Diagnostic::make(DiagCode::BadValue, line_at(src.trial_lines, t, step_line),
                    std::string(what) + " #" + std::to_string(index) + " of TRIAL" + std::to_string(row.id)
                        + " is '" + row.columns[index - 1] + "', not a number"));
            }
        }
    };
    for (std::size_t i = 0; i < events.size(); ++i) {
        const int line = line_at(src.event_lines, i, events_line);
        if (const auto* play = std::get_if<step::PlaySound>(&events[i].command)) {
            check_numeric(play->volume, true, "VOLUME", line);
            check_numeric(play->time_begin, false, "TIME_BEGIN", line);
            check_numeric(play->time_end, false, "TIME_END", line);
        } else if (const auto* get = std::get_if<step::GetInput>(&events[i].command)) {
            check_numeric(get->delay, false, "DELAY", line);
        }
    }

    // Settings groups.
    if (script.groups.empty()) {
        out.push_back(Diagnostic::make(DiagCode::NoGroup, src.last_line,
            "no [SETTINGS_...] section; default settings apply"));
    }
    std::set<int> ids;
    for (const auto& t : script.trials) {
        ids.insert(t.id);
    }
    for (std::size_t g = 0; g < script.groups.size(); ++g) {
        const auto& group = script.groups[g];
        const auto& gsrc = g < src.groups.size() ? src.groups[g] : SourceMap::Group{};
        auto key_line = [&](const char* key) {
            auto it = gsrc.key_lines.find(key);
            return it == gsrc.key_lines.end() ? gsrc.header_line : it->second;
        };
        if (group.training_order) {
            for (int id : *group.training_order) {
                if (!ids.contains(id)) {
                    out.push_back(Diagnostic::make(DiagCode::TrainingRef, key_line("TRAINING_ORDER"),
                        "TRAINING_ORDER of " + group.name + " names TRIAL" + std::to_string(id)
                            + ", which is not defined"));
                }
            }
        }
        if (uses_input && group.input_map.empty()) {
            out.push_back(Diagnostic::make(DiagCode::NoInputMap, gsrc.header_line,
                "group " + group.name + " has no INPUT keys; GET_INPUT can only time out"));
        }
        if (group.correct) {
            std::set<std::string> labels;
            for (const auto& m : group.input_map) {
                labels.insert(m.label);
            }
            for (const auto& row : script.trials) {
                if (const auto* ref = std::get_if<ColumnRef>(&*group.correct);
                    ref && static_cast<std::size_t>(ref->index) > row.columns.size()) {
                    continue;
                }
                const auto expected = resolve_arg(*group.correct, row);
                if (!labels.contains(expected)) {
                    out.push_back(Diagnostic::make(DiagCode::CorrectLabel, key_line("CORRECT"),
                        "CORRECT of TRIAL" + std::to_string(row.id) + " is '" + expected
                            + "', which is not an INPUT label of " + group.name));
                    break;
                }
            }
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    return out;
}

} // namespace stimrun
