#include <gtest/gtest.h>

#include "stimrun/error.hpp"
#include "stimrun/response_log.hpp"
#include "support.hpp"

namespace stimrun {
namespace {

const std::vector<FieldToken> reference_format = [] {
    std::vector<FieldToken> f;
    for (const auto* t : {"$$SUBJECT", "$TRIAL", "#1", "#2", "#3", "$RESPONSE", "$ERROR", "#4", "#5", "$RTIME"}) {
        f.push_back(*FieldToken::parse(t));
    }
    return f;
}();

TEST(ResponseLog, HeaderUsesCanonicalTokens) {
    EXPECT_EQ(header_cells(reference_format), (std::vector<std::string>{"$SUBJECT", "$TRIAL", "#1", "#2", "#3",
                                                "$RESPONSE", "$ERROR", "#4", "#5", "$RTIME"}));
}

TEST(ResponseLog, RowsForAnsweredAndTimedOutTrials) {
    TrialRow trial{1, {"1)main 2)bain", "bain.wav", "Choix2", "-nasal", "E~"}};
    TrialOutcome o;
    o.trial_id = 1;
    o.resolved_columns = trial.columns;
    o.response = "Choix2";
    o.correctness = Correctness::Ok;
    o.rtime_ms = 748;
    EXPECT_EQ(render_row(o, trial, reference_format, "ca").cells,
        (std::vector<std::string>{"ca", "1", "1)main 2)bain", "bain.wav", "Choix2", "Choix2", "ok", "-nasal", "E~",
            "748"}));
    o.response.reset();
    o.correctness = Correctness::NoResponse;
    o.rtime_ms = 0;
    const auto row = render_row(o, trial, reference_format, "ca");
    EXPECT_EQ(row.cells[5], "xxx");
    EXPECT_EQ(row.cells[6], "xxx");
    EXPECT_EQ(row.cells[9], "0");
}

TEST(ResponseLog, NotApplicableIsEmpty) {
    EXPECT_EQ(correctness_text(Correctness::NotApplicable), "");
    EXPECT_EQ(correctness_text(Correctness::Err), "err");
}

TEST(ResponseLog, ColumnOutOfRange) {
    TrialRow trial{1, {"a"}};
    TrialOutcome o;
    try {
        render_row(o, trial, reference_format, "ca");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RefRange);
    }
}

TEST(ResponseLog, WriterFlushesEachRow) {
    test::TempDir dir;
    const auto path = dir / "s.tsv";
    ResponseWriter writer(path, default_response_format());
    EXPECT_EQ(test::read_text_file(path), "$SUBJECT\t$TRIAL\t$RESPONSE\t$ERROR\t$RTIME\n");
    writer.append(ResponseRow{{"s1", "3", "A", "ok", "512"}});
    EXPECT_EQ(test::read_text_file(path), "$SUBJECT\t$TRIAL\t$RESPONSE\t$ERROR\t$RTIME\ns1\t3\tA\tok\t512\n");
    EXPECT_THROW(writer.append(ResponseRow{{"s1", "3", "A\tB", "ok", "512"}}), Error);
}

TEST(ResponseLog, PhaseColumn) {
    test::TempDir dir;
    const auto path = dir / "p.tsv";
    {
        ResponseWriter writer(path, default_response_format(), true);
        writer.append(ResponseRow{{"s", "1", "A", "ok", "1"}}, Phase::Training);
        writer.append(ResponseRow{{"s", "2", "B", "err", "2"}}, Phase::Test);
    }
    const auto lines = read_response_file(path);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0].back(), "PHASE");
    EXPECT_EQ(lines[1].back(), "training");
    EXPECT_EQ(lines[2].back(), "test");
}

TEST(ResponseLog, WriteAndReadBack) {
    test::TempDir dir;
    const auto path = dir / "w.tsv";
    const std::vector<ResponseRow> rows{{{"ca", "4", "Choix2", "err", "1072"}}, {{"ca", "8", "xxx", "xxx", "0"}}};
    write_response_file(rows, default_response_format(), path);
    const auto back = read_response_file(path);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[1], rows[0].cells);
    EXPECT_EQ(back[2], rows[1].cells);
    EXPECT_THROW(write_response_file(rows, default_response_format(), dir / "missing" / "x.tsv"), Error);
}

TEST(ResponseLog, DefaultFileName) {
    EXPECT_EQ(default_response_file_name("ca", "Paires Minimales r\xC3\xA9" "duites"),
        "ca_paires-minimales-reduites.tsv");
}

} // namespace
} // namespace stimrun
