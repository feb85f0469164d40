#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stimrun {

/// True when `bytes` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view bytes);

/// Decodes a script or instruction file into UTF-8 text. Input that is not
/// valid UTF-8 is taken as Latin-1. A leading UTF-8 byte-order mark is
/// dropped.
std::string decode_text(std::string_view bytes);

std::string_view trim(std::string_view s);

/// Splits on LF, stripping a trailing CR from each line.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split_words(std::string_view s);

/// Splits `<a> <b c><d>` into {"a", "b c", "d"}, each trimmed. Only
/// whitespace is allowed between groups. Returns nullopt on unbalanced
/// brackets or stray text.
std::optional<std::vector<std::string>> split_angle_groups(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

std::optional<std::int64_t> parse_int(std::string_view s);

/// Parses a signed decimal such as "-3", "250" or "27.5".
std::optional<double> parse_decimal(std::string_view s);

/// Parses a non-negative decimal millisecond value into whole microseconds.
/// At most three fractional digits are accepted so the conversion is exact.
std::optional<std::int64_t> parse_millis_as_micros(std::string_view s);

/// Lower-case ASCII slug of a title, with common accented Latin letters
/// folded to their base letter ("Paires Minimales réduites" ->
/// "paires-minimales-reduites").
std::string slugify(std::string_view title);

} // namespace stimrun
