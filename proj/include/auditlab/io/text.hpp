#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace auditlab::io {

// Shortest representation that parses back to the same double.
std::string format_exact(double v);
// Six significant digits, '.' decimal separator, locale independent.
std::string format_sig6(double v);

// nullopt on anything but a complete numeric token.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string trim(std::string_view s);

// RFC 4180 style reader: quoted fields may contain commas and doubled quotes.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // False at end of input. Blank lines are skipped.
    bool next(std::vector<std::string>& fields);
    std::size_t line_number() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

std::string csv_escape(std::string_view field);

}  // namespace auditlab::io
