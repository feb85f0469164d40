#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stimrun/scheduler.hpp"
#include "stimrun/script.hpp"

namespace stimrun {

struct ResponseRow {
    std::vector<std::string> cells;
    bool operator==(const ResponseRow&) const = default;
};

/// Text written for a missing response and its error flag.
inline constexpr std::string_view no_response_text = "xxx";

std::string_view correctness_text(Correctness c);

/// One cell per token. Throws Error(RefRange) for a column token beyond the
/// trial row.
ResponseRow render_row(const TrialOutcome& outcome, const TrialRow& trial, std::span<const FieldToken> format,
    std::string_view subject_code);

/// Header line cells: the canonical token names.
std::vector<std::string> header_cells(std::span<const FieldToken> format);

// Tab-separated response file, UTF-8, LF line endings. The header is written
// on open and each row is flushed as it is appended, so a crash keeps every
// completed trial. An optional trailing PHASE column marks training rows.
class ResponseWriter {
public:
    ResponseWriter(const std::filesystem::path& path, std::span<const FieldToken> format, bool phase_column = false);

    void append(const ResponseRow& row, Phase phase = Phase::Test);
    void close();

private:
    void write_line(std::span<const std::string> cells);

    std::filesystem::path path_;
    std::ofstream out_;
    bool phase_column_;
};

/// Writes header + rows in one go. Throws Error(Io).
void write_response_file(std::span<const ResponseRow> rows, std::span<const FieldToken> format,
    const std::filesystem::path& path);

/// Splits a response file back into its lines of cells (header included).
std::vector<std::vector<std::string>> read_response_file(const std::filesystem::path& path);

/// Default file name: "<subject>_<title slug>.tsv".
std::string default_response_file_name(std::string_view subject_code, std::string_view title);

} // namespace stimrun
