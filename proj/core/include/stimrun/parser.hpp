#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stimrun/diagnostic.hpp"
#include "stimrun/script.hpp"

namespace stimrun {

struct ParseResult {
    std::optional<Script> script; // set iff diagnostics contain no Error
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return script.has_value(); }
};

/// Parses decoded script text. Unknown lines inside known sections become
/// warnings; unknown section headers and malformed entries become errors.
ParseResult parse_script(std::string_view text);

/// Parses `TRIAL<n>=<a> <b> ...`. Throws SyntaxError.
TrialRow parse_trial_line(std::string_view line);

/// Parses `X<n>=VERB...`. Throws SyntaxError.
EventStep parse_event_line(std::string_view line);

/// Applies one `KEY=value` entry of a settings section. Returns nullopt for an
/// unknown key; throws SyntaxError(BadSetting) for a malformed value.
std::optional<SettingsGroup> parse_settings_entry(
    std::string_view key, std::string_view value, SettingsGroup group);

/// Parses `#N` or literal text.
Arg parse_arg(std::string_view text);

/// Static checks on a parsed script. Never throws.
std::vector<Diagnostic> validate_script(const Script& script);

/// Returns the text an argument denotes for `trial`. Throws
/// Error(ErrorCode::RefRange) when a column reference exceeds the row.
std::string resolve_arg(const Arg& arg, const TrialRow& trial);

/// Canonical script text; parse_script(render_script(s)) == s.
std::string render_script(const Script& script);

std::string render_arg(const Arg& arg);

} // namespace stimrun
