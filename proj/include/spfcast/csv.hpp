#pragma once

#include <string>
#include <vector>

namespace spfcast {

/// Minimal strict CSV support for the engine's schemas: comma-separated,
/// no quoting, header row required, UTF-8, LF or CRLF.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Full-precision decimal formatting (round-trips a double exactly).
std::string format_double(double v);

}  // namespace spfcast
