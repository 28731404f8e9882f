#pragma once

// Minimal comma-separated text reader/writer (RFC 4180 quoting, one record per line).

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crids/model.hpp"

namespace crids {

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

class IoError : public Error {
public:
    using Error::Error;
};

struct CsvRow {
    std::size_t line = 0;  // 1-based line number in the source
    std::vector<std::string> fields;
};

struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<CsvRow> rows;

    std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

std::string csv_escape(std::string_view field);
void append_row(std::string& out, const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double v);
std::string format_fixed(double v, int decimals);

/// Strict decimal parse; surrounding spaces allowed.
std::optional<double> parse_number(std::string_view text);

}  // namespace crids
