#include "csv.hpp"

#include <charconv>
#include <istream>

#include "geoscore/error.hpp"

namespace geoscore::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Reader::Reader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

bool Reader::next(Row& row) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (line_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;

        row.line = line_;
        row.fields.clear();
        std::size_t pos = 0;
        while (true) {
            Field field;
            field.column = pos + 1;
            std::size_t start = pos;
            while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
            if (start < line.size() && line[start] == '"') {
                std::size_t i = start + 1;
                bool closed = false;
                while (i < line.size()) {
                    if (line[i] == '"') {
                        if (i + 1 < line.size() && line[i + 1] == '"') {
                            field.text.push_back('"');
                            i += 2;
                            continue;
                        }
                        closed = true;
                        ++i;
                        break;
                    }
                    field.text.push_back(line[i++]);
                }
                if (!closed) {
                    throw ParseError(source_, line_, field.column, "unterminated quoted field");
                }
                while (i < line.size() && line[i] != ',') {
                    if (line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
                        throw ParseError(source_, line_, i + 1,
                                         "unexpected character after quoted field");
                    }
                    ++i;
                }
                pos = i;
            } else {
                const auto comma = line.find(',', pos);
                const auto end = comma == std::string::npos ? line.size() : comma;
                field.text = std::string(trim(std::string_view(line).substr(pos, end - pos)));
                pos = end;
            }
            row.fields.push_back(std::move(field));
            if (pos >= line.size()) break;
            ++pos;  // skip the comma
            if (pos == line.size()) {
                row.fields.push_back(Field{"", pos + 1});
                break;
            }
        }
        return true;
    }
    return false;
}

void fail(const std::string& source, const Row& row, std::size_t field, const std::string& what) {
    const std::size_t column = field < row.fields.size() ? row.fields[field].column : 1;
    throw ParseError(source, row.line, column, what);
}

std::int64_t parse_count(const std::string& source, const Row& row, std::size_t field) {
    const std::string& text = row.fields[field].text;
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        fail(source, row, field, "expected a non-negative integer, got '" + text + "'");
    }
    if (value < 0) fail(source, row, field, "negative count '" + text + "'");
    return value;
}

std::string escape(std::string_view text) {
    const bool needs_quotes =
        text.find_first_of(",\"\n") != std::string_view::npos ||
        (!text.empty() && (text.front() == ' ' || text.back() == ' '));
    if (!needs_quotes) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace geoscore::csv
