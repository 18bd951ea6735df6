#include "flowset/csv.hpp"

namespace flowset::csv {

std::optional<Row> Reader::next() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    ++line_;
    record_line_ = line_;
    if (line_ == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

    Row row;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    std::size_t i = 0;
    for (;;) {
        if (i >= line.size()) {
            if (quoted) {
                // embedded newline inside a quoted field
                std::string more;
                if (!std::getline(in_, more)) throw ParseError("unterminated quoted field", record_line_);
                ++line_;
                field += '\n';
                line = std::move(more);
                i = 0;
                continue;
            }
            break;
        }
        const char c = line[i++];
        if (quoted) {
            if (c == '"') {
                if (i < line.size() && line[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                    after_quote = true;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (c == '"' && field.empty() && !after_quote) {
            quoted = true;
        } else if (c == '\r' && i == line.size()) {
            // CRLF
        } else {
            if (after_quote) throw ParseError("text after closing quote", record_line_);
            field += c;
        }
    }
    row.push_back(std::move(field));
    return row;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

}  // namespace flowset::csv
