#include <gtest/gtest.h>

#include <algorithm>

#include "stimrun/parser.hpp"
#include "support.hpp"

namespace stimrun {
namespace {

std::vector<Diagnostic> check(const std::string& text) {
    auto parsed = parse_script(text);
    if (!parsed.script) {
        return parsed.diagnostics;
    }
    return validate_script(*parsed.script);
}

const Diagnostic* find(const std::vector<Diagnostic>& diags, DiagCode code) {
    auto it = std::find_if(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; });
    return it == diags.end() ? nullptr : &*it;
}

const std::string trials = "[TRIAL_DATA]\nTRIAL1=<a><b.wav><2000>\nTRIAL2=<c><d.wav>\n";

TEST(Validate, ReferenceScriptHasNoErrors) {
    const auto script = test::parse_ok(test::read_text_file(test::data_path("pairs_reference.stim")));
    const auto diags = validate_script(script);
    EXPECT_FALSE(has_errors(diags));
    // TRAINING_ORDER names trials 3 and 6 but the script only defines 1-4.
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].code, DiagCode::TrainingRef);
    EXPECT_EQ(diags[0].severity, Severity::Warning);
}

TEST(Validate, MissingEndReportsLine) {
    const auto diags = check(trials + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=DISPLAY_TEXT<#1>\n");
    const auto* d = find(diags, DiagCode::NoEnd);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->line, 6);
    EXPECT_EQ(d->severity, Severity::Error);
}

TEST(Validate, MissingBegin) {
    EXPECT_TRUE(find(check(trials + "[TRIAL_EVENTS]\nX10=DISPLAY_TEXT<#1>\nX20=END\n"), DiagCode::NoBegin));
}

TEST(Validate, MisplacedMarkers) {
    const auto diags = check(trials + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=END\nX30=DISPLAY_TEXT<#1>\nX40=END\n");
    const auto* d = find(diags, DiagCode::MarkerPosition);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->line, 6);
}

TEST(Validate, DuplicateLabels) {
    const auto diags = check(trials + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=DISPLAY_TEXT<#1>\nX20=DISPLAY_TEXT<#1>\nX30=END\n");
    EXPECT_TRUE(find(diags, DiagCode::DupLabel));
}

TEST(Validate, ColumnReferenceBeyondNarrowestRow) {
    // TRIAL2 has only two columns.
    const auto diags = check(trials + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=GET_INPUT<DELAY #3>\nX30=END\n");
    const auto* d = find(diags, DiagCode::RefRange);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->line, 6);
}

TEST(Validate, ResponseFormatAndCorrectReferences) {
    const auto diags = check(trials
        + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=END\n[SETTINGS_G]\nCORRECT=<#5>\nRESPONSE_FORMAT=<$TRIAL><#4>\n");
    EXPECT_EQ(std::count_if(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.code == DiagCode::RefRange; }),
        2);
}

TEST(Validate, NumericReferenceMustResolveToNumber) {
    const auto diags = check("[TRIAL_DATA]\nTRIAL1=<-3>\nTRIAL2=<loud>\n[TRIAL_EVENTS]\nX10=BEGIN\n"
                             "X20=PLAY_SOUND<a.wav><VOLUME #1>\nX30=END\n");
    const auto* d = find(diags, DiagCode::BadValue);
    ASSERT_NE(d, nullptr);
    EXPECT_NE(d->message.find("TRIAL2"), std::string::npos);
}

TEST(Validate, Warnings) {
    auto diags = check(trials + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=GET_INPUT\nX30=END\n");
    EXPECT_TRUE(find(diags, DiagCode::NoGroup));

    diags = check(trials + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=GET_INPUT\nX30=END\n[SETTINGS_G]\nPAUSE=0\n");
    EXPECT_TRUE(find(diags, DiagCode::NoInputMap));

    diags = check(trials
        + "[TRIAL_EVENTS]\nX10=BEGIN\nX20=GET_INPUT\nX30=END\n[SETTINGS_G]\nINPUT=<Yes CK_1>\nCORRECT=<#1>\n");
    const auto* d = find(diags, DiagCode::CorrectLabel);
    ASSERT_NE(d, nullptr);
    EXPECT_EQ(d->severity, Severity::Warning);
    EXPECT_FALSE(has_errors(diags));
}

TEST(Validate, DiagnosticsSortedByLine) {
    const auto diags = check(trials + "[TRIAL_EVENTS]\nX10=GET_INPUT<DELAY #9>\nX20=DISPLAY_TEXT<#1>\n");
    ASSERT_GE(diags.size(), 2u);
    EXPECT_TRUE(std::is_sorted(diags.begin(), diags.end(),
        [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; }));
}

} // namespace
} // namespace stimrun
