#include "fsonet/csv.hpp"

#include "fsonet/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace fsonet {

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::string format_fixed(double value, int decimals) {
    std::string s = fmt::format("{:.{}f}", value, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

std::string format_general(double value) { return fmt::format("{}", value); }

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_) {
        throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    }
    write(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw Error(ErrorCode::InvariantViolation,
                    fmt::format("{}: row has {} fields, header has {}", path_, fields.size(), columns_));
    }
    write(fields);
}

void CsvWriter::write(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << csv_escape(fields[i]);
    }
    out_ << "\r\n";
    if (!out_) {
        throw Error(ErrorCode::IoError, "write failed for '" + path_ + "'");
    }
}

}  // namespace fsonet
