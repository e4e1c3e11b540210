#pragma once

// Minimal RFC 4180 reader: comma separated, optional double quotes, header row.
// Tracks 1-based line and column of every field for error messages.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace geoscore::csv {

struct Field {
    std::string text;
    std::size_t column = 1;
};

struct Row {
    std::size_t line = 0;
    std::vector<Field> fields;
};

class Reader {
  public:
    Reader(std::istream& in, std::string_view source);

    /// Next non-blank row; false at end of input.
    bool next(Row& row);
    const std::string& source() const noexcept { return source_; }

  private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
};

[[noreturn]] void fail(const std::string& source, const Row& row, std::size_t field,
                       const std::string& what);

std::int64_t parse_count(const std::string& source, const Row& row, std::size_t field);

/// Quotes a field when it contains a comma, quote or surrounding whitespace.
std::string escape(std::string_view text);

}  // namespace geoscore::csv
