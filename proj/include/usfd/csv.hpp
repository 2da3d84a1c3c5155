#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace usfd {

/// RFC 4180 field quoting: fields containing comma, quote, CR or LF are quoted
/// and embedded quotes doubled.
std::string csv_escape(const std::string& field);

/// Shortest round-trip-stable text for a double ("nan" for NaN).
std::string csv_number(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

}  // namespace usfd
