#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace fsonet {

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in double quotes with embedded quotes doubled.
std::string csv_escape(std::string_view field);

/// Fixed-point formatting with a fixed number of decimals; "-0.000" is
/// normalized to "0.000" so output bytes do not depend on the sign of zero.
std::string format_fixed(double value, int decimals);

/// Shortest round-trip representation.
std::string format_general(double value);

class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header);

    void row(const std::vector<std::string>& fields);

private:
    void write(const std::vector<std::string>& fields);

    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace fsonet
