#include "stimrun/response_log.hpp"

#include <iterator>

#include "stimrun/error.hpp"
#include "stimrun/parser.hpp"
#include "stimrun/text.hpp"

namespace stimrun {

std::string_view correctness_text(Correctness c) {
    switch (c) {
    case Correctness::Ok: return "ok";
    case Correctness::Err: return "err";
    case Correctness::NoResponse: return no_response_text;
    case Correctness::NotApplicable: return "";
    }
    return "";
}

ResponseRow render_row(const TrialOutcome& outcome, const TrialRow& trial, std::span<const FieldToken> format,
    std::string_view subject_code) {
    ResponseRow row;
    row.cells.reserve(format.size());
    for (const auto& token : format) {
        switch (token.kind) {
        case FieldKind::Subject:
            row.cells.emplace_back(subject_code);
            break;
        case FieldKind::Trial:
            row.cells.push_back(std::to_string(trial.id));
            break;
        case FieldKind::Response:
            row.cells.emplace_back(outcome.response ? std::string_view(*outcome.response) : no_response_text);
            break;
        case FieldKind::Error:
            row.cells.emplace_back(correctness_text(outcome.correctness));
            break;
        case FieldKind::RTime:
            row.cells.push_back(std::to_string(outcome.rtime_ms));
            break;
        case FieldKind::Column:
            row.cells.push_back(resolve_arg(ColumnRef{token.column}, trial));
            break;
        }
    }
    return row;
}

std::vector<std::string> header_cells(std::span<const FieldToken> format) {
    std::vector<std::string> cells;
    for (const auto& token : format) {
        cells.push_back(token.name());
    }
    return cells;
}

ResponseWriter::ResponseWriter(const std::filesystem::path& path, std::span<const FieldToken> format, bool phase_column)
    : path_(path)
    , out_(path, std::ios::binary | std::ios::trunc)
    , phase_column_(phase_column) {
    if (!out_) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    auto header = header_cells(format);
    if (phase_column_) {
        header.emplace_back("PHASE");
    }
    write_line(header);
}

void ResponseWriter::append(const ResponseRow& row, Phase phase) {
    if (!phase_column_) {
        write_line(row.cells);
        return;
    }
    auto cells = row.cells;
    cells.emplace_back(phase_name(phase));
    write_line(cells);
}

void ResponseWriter::close() {
    out_.close();
    if (out_.fail()) {
        throw Error(ErrorCode::Io, "cannot finish " + path_.string());
    }
}

void ResponseWriter::write_line(std::span<const std::string> cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of("\t\n\r") != std::string::npos) {
            throw Error(ErrorCode::BadValue, "response cell contains a tab or newline: '" + cells[i] + "'");
        }
        if (i) {
            line += '\t';
        }
        line += cells[i];
    }
    line += '\n';
    out_ << line;
    out_.flush();
    if (!out_) {
        throw Error(ErrorCode::Io, "write failed on " + path_.string());
    }
}

void write_response_file(std::span<const ResponseRow> rows, std::span<const FieldToken> format,
    const std::filesystem::path& path) {
    ResponseWriter writer(path, format);
    for (const auto& row : rows) {
        writer.append(row);
    }
    writer.close();
}

std::vector<std::vector<std::string>> read_response_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path.string());
    }
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<std::vector<std::string>> lines;
    for (auto line : split_lines(text)) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            cells.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) {
                break;
            }
            start = tab + 1;
        }
        lines.push_back(std::move(cells));
    }
    return lines;
}

std::string default_response_file_name(std::string_view subject_code, std::string_view title) {
    auto slug = slugify(title);
    if (slug.empty()) {
        slug = "responses";
    }
    return std::string(subject_code) + "_" + slug + ".tsv";
}

} // namespace stimrun
