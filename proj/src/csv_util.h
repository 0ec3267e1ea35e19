#ifndef MODELSEL_SRC_CSV_UTIL_H_
#define MODELSEL_SRC_CSV_UTIL_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modelsel::csv {

// Splits one RFC 4180 record. Double-quoted fields may contain commas and
// "" escapes. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> SplitLine(std::string_view line);

// Quotes the field only when it contains a comma, quote or newline.
std::string Escape(std::string_view field);

std::string_view Trim(std::string_view s);

// Whole-field decimal parse; rejects trailing garbage, inf and nan.
std::optional<double> ParseDouble(std::string_view field);

// printf %.6g.
std::string FormatG6(double value);

// Reads all lines, stripping a UTF-8 BOM and trailing '\r'. Throws IoError.
std::vector<std::string> ReadLines(const std::filesystem::path& path);

}  // namespace modelsel::csv

#endif  // MODELSEL_SRC_CSV_UTIL_H_
