#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jointloss::io {

/// Shortest-roundtrip-safe text for a double: 17 significant digits,
/// locale-independent; "nan"/"inf" for non-finite values.
std::string format_number(double x);

/// Writes a header and rows with Unix newlines.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t columns_;
};

/// Parses a numeric CSV (rows = observations); a non-numeric first row is
/// treated as a header and skipped.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in);

}  // namespace jointloss::io
