#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stimrun {

enum class Severity { Error, Warning };

// Closed set of diagnostic identifiers. The names are stable and appear in
// CLI output.
enum class DiagCode {
    NoSection,      // E_NO_SECTION: content before the first [SECTION], or no section at all
    BadSection,     // E_BAD_SECTION: unknown section header
    Syntax,         // E_SYNTAX: malformed KEY=value, TRIAL or X line
    DupTrial,       // E_DUP_TRIAL
    NoTrials,       // E_NO_TRIALS: no TRIALn rows
    DupGroup,       // E_DUP_GROUP: two [SETTINGS_x] with the same name
    BadCommand,     // E_BAD_COMMAND: unknown event verb
    BadModifier,    // E_BAD_MODIFIER: unknown <KEYWORD ...> on PLAY_SOUND/GET_INPUT
    BadSetting,     // E_BAD_SETTING: malformed settings value
    BadValue,       // E_BAD_VALUE: numeric modifier that is not a valid number
    NoBegin,        // E_NO_BEGIN: program does not start with BEGIN
    NoEnd,          // E_NO_END: program does not end with END
    MarkerPosition, // E_MARKER_POS: BEGIN/END repeated or misplaced
    DupLabel,       // E_DUP_LABEL: two steps share an XNN label
    RefRange,       // E_REF_RANGE: #N beyond the narrowest trial row
    BadCell,        // E_BAD_CELL: cell contains a tab or newline
    UnknownLine,    // W_UNKNOWN_LINE
    UnknownSetting, // W_UNKNOWN_SETTING
    NoGroup,        // W_NO_GROUP: no settings group; a default one is used
    TrainingRef,    // W_TRAINING_REF: TRAINING_ORDER names a missing trial
    CorrectLabel,   // W_CORRECT_LABEL: CORRECT resolves to a non-response label
    EventOrder,     // W_EVENT_ORDER: labels not ascending in file order
    NoInputMap,     // W_NO_INPUT: GET_INPUT used but INPUT is empty
};

std::string_view diag_code_name(DiagCode code);
Severity diag_severity(DiagCode code);

struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 1;
    std::string message;
    DiagCode code = DiagCode::Syntax;

    static Diagnostic make(DiagCode code, int line, std::string message);

    /// "error E_NO_END 12 program does not end with END"
    std::string to_string() const;

    bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Thrown by the single-line parsers. parse_script converts it to a
// Diagnostic carrying the offending line number.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(DiagCode code, const std::string& message)
        : std::runtime_error(message)
        , code_(code) {}

    DiagCode code() const noexcept { return code_; }

private:
    DiagCode code_;
};

} // namespace stimrun
