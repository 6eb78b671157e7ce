#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "topotext/errors.hpp"

namespace topotext {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0; // line the record started on, 1-based
};

// RFC 4180 style reader: quoted fields may contain commas, escaped quotes
// ("") and newlines. CRLF and LF both accepted.
inline std::vector<CsvRecord> read_csv(std::istream& in) {
    std::vector<CsvRecord> records;
    std::string field;
    CsvRecord record;
    record.line = 1;
    std::size_t line = 1;
    bool in_quotes = false;
    bool record_started = false;
    bool field_was_quoted = false;

    auto end_field = [&]() {
        record.fields.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record = CsvRecord{};
        record.line = line;
        record_started = false;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted)
                throw parse_error("stray quote inside unquoted field", line);
            in_quotes = true;
            field_was_quoted = true;
            record_started = true;
            break;
        case ',':
            end_field();
            record_started = true;
            break;
        case '\r':
            break;
        case '\n':
            ++line;
            if (record_started || !record.fields.empty() || !field.empty() || field_was_quoted)
                end_record();
            else
                record.line = line; // skip fully empty line
            break;
        default:
            field.push_back(c);
            record_started = true;
            break;
        }
    }
    if (in_quotes) throw parse_error("unterminated quoted field", record.line);
    if (record_started || !record.fields.empty() || !field.empty()) end_record();
    return records;
}

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(fields[i]);
    }
    out << '\n';
}

} // namespace topotext
