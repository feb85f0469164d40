#include <cstdio>

#include "stimrun/parser.hpp"

namespace stimrun {

namespace {

std::string hex_color(const Rgb& c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%02X%02X%02X", c.r, c.g, c.b);
    return buf;
}

std::string position_text(unsigned flags) {
    static constexpr std::pair<unsigned, const char*> names[] = {
        {HCenter, "HCenter"}, {VCenter, "VCenter"}, {Left, "Left"},
        {Right, "Right"}, {Top, "Top"}, {Bottom, "Bottom"}};
    std::string out;
    for (const auto& [flag, name] : names) {
        if (flags & flag) {
            if (!out.empty()) {
                out += '|';
            }
            out += name;
        }
    }
    return out.empty() ? "None" : out;
}

std::string render_step(const EventStep& step) {
    std::string out = "X" + std::to_string(step.label) + "=";
    std::visit([&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, step::Begin>) {
            out += "BEGIN";
        } else if constexpr (std::is_same_v<T, step::End>) {
            out += "END";
        } else if constexpr (std::is_same_v<T, step::DisplayText>) {
            out += "DISPLAY_TEXT<" + render_arg(cmd.text) + ">";
        } else if constexpr (std::is_same_v<T, step::DisplayImageFile>) {
            out += "DISPLAY_FILEBMP<" + render_arg(cmd.path) + ">";
        } else if constexpr (std::is_same_v<T, step::PlaySound>) {
            out += "PLAY_SOUND<" + render_arg(cmd.source) + ">";
            if (cmd.volume) out += "<VOLUME " + render_arg(*cmd.volume) + ">";
            if (cmd.time_begin) out += "<TIME_BEGIN " + render_arg(*cmd.time_begin) + ">";
            if (cmd.time_end) out += "<TIME_END " + render_arg(*cmd.time_end) + ">";
        } else if constexpr (std::is_same_v<T, step::GetInput>) {
            out += "GET_INPUT";
            if (cmd.delay) out += "<DELAY " + render_arg(*cmd.delay) + ">";
        }
    }, step.command);
    return out;
}

} // namespace

std::string render_arg(const Arg& arg) {
    if (const auto* ref = std::get_if<ColumnRef>(&arg)) {
        return "#" + std::to_string(ref->index);
    }
    return std::get<Literal>(arg).text;
}

std::string render_script(const Script& script) {
    std::string out;
    if (!script.info.empty()) {
        out += "[INFORMATION]\n";
        for (const auto& [key, value] : script.info) {
            out += key + "=" + value + "\n";
        }
        out += "\n";
    }
    out += "[TRIAL_DATA]\n";
    for (const auto& row : script.trials) {
        out += "TRIAL" + std::to_string(row.id) + "=";
        for (std::size_t i = 0; i < row.columns.size(); ++i) {
            out += (i ? " <" : "<") + row.columns[i] + ">";
        }
        out += "\n";
    }
    out += "\n[TRIAL_EVENTS]\n";
    for (const auto& step : script.events) {
        out += render_step(step) + "\n";
    }
    for (const auto& g : script.groups) {
        out += "\n[SETTINGS_" + g.name + "]\n";
        if (g.instruction_file) {
            out += "INSTRUCTION_FORMAT=<" + *g.instruction_file + ">\n";
        }
        if (g.training_order) {
            out += "TRAINING_ORDER=<";
            for (std::size_t i = 0; i < g.training_order->size(); ++i) {
                out += (i ? " " : "") + std::to_string((*g.training_order)[i]);
            }
            out += ">\n";
        }
        out += std::string("TRIAL_ORDER=<") + (g.trial_order == TrialOrder::Random ? "RANDOM" : "FIXED") + ">\n";
        const auto& f = g.text_format;
        out += "TEXT_FORMAT=<FONT " + f.font + "><SIZE " + std::to_string(f.size) + "><BKCOLOR "
            + hex_color(f.bkcolor) + "><TXTCOLOR " + hex_color(f.txtcolor) + "><POSITION "
            + position_text(f.position) + ">\n";
        out += "INPUT=";
        for (const auto& m : g.input_map) {
            out += "<" + m.label;
            for (const auto& k : m.codes) {
                out += " " + k.name();
            }
            out += ">";
        }
        out += "\n";
        if (g.correct) {
            out += "CORRECT=<" + render_arg(*g.correct) + ">\n";
        }
        out += "PAUSE=" + std::to_string(g.pause_ms) + "\n";
        out += "RESPONSE_FORMAT=";
        for (const auto& t : g.response_format) {
            out += "<" + t.name() + ">";
        }
        out += "\n";
        if (g.sound_feedback) {
            out += "SOUND_FEEDBACK=<POSITIVE " + g.sound_feedback->positive + "><NEGATIVE "
                + g.sound_feedback->negative + ">\n";
        }
    }
    return out;
}

} // namespace stimrun
