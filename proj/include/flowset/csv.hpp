#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flowset::csv {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

using Row = std::vector<std::string>;

/// RFC-4180 reader. Quoted fields may span lines; CRLF and LF both end a
/// record. Line numbers are 1-based and refer to the first line of a record.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::optional<Row> next();
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

}  // namespace flowset::csv
