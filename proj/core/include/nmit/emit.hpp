#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nmit/sweep.hpp"

namespace nmit {

enum class Format { csv, json };

Format parse_format(std::string_view name);

/// CSV: header row, ',' separator, '\n' line endings, shortest round-trip
/// decimals, no metadata. JSON: column arrays plus the metadata block.
std::string format_table(const SpectrumTable& table, Format format);

/// Writes atomically (temporary file + rename); throws IoError.
void emit(const SpectrumTable& table, Format format, const std::filesystem::path& path);

SpectrumTable parse_json_table(std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace nmit
