#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logsample::csv {

/// RFC-4180 style record reader: comma separated, double-quote quoting,
/// quoted fields may span lines. Tracks the physical line of each record.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next record, or nullopt at end of input. Throws ParseError on an
    /// unterminated quote or stray characters after a closing quote.
    std::optional<std::vector<std::string>> next();

    /// Line on which the most recently returned record started (1-based).
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Joins escaped fields with commas and appends '\n'.
std::string format_row(const std::vector<std::string>& fields);

}  // namespace logsample::csv
