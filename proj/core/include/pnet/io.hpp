#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pnet::io {

/// One parsed line of a delimited text file, with its 1-based line number.
struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Reads a delimited text file. Blank lines and lines starting with '#' are
/// skipped; trailing '\r' is stripped.
std::vector<Record> read_delimited(const std::filesystem::path& path, char delimiter);

std::vector<std::string> split(std::string_view line, char delimiter);

/// Parses a finite double; throws DataError naming `where` otherwise.
double parse_double(std::string_view text, std::string_view where);

long long parse_integer(std::string_view text, std::string_view where);

/// Shortest form that reads back to the identical double (17 significant digits).
std::string format_double(double value);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text(const std::filesystem::path& path);

}  // namespace pnet::io
