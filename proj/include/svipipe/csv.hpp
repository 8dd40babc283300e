#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

// Minimal RFC 4180 CSV reader/writer (UTF-8, header row, quoted fields).

namespace svipipe::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const {
        for (size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    int require_column(std::string_view name) const {
        const int idx = column(name);
        if (idx < 0) throw std::runtime_error("missing CSV column: " + std::string(name));
        return idx;
    }
};

// Splits a full CSV document into records, honoring quoted fields that may
// contain commas, quotes, and newlines.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        records.push_back(std::move(row));
        row.clear();
    };

    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_row();
        } else if (c == '\n') {
            end_row();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw std::runtime_error("unterminated quoted CSV field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return records;
}

inline Table read(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    auto records = parse(buf.str());
    Table t;
    if (records.empty()) return t;
    t.header = std::move(records.front());
    for (auto it = records.begin() + 1; it != records.end(); ++it) {
        // Tolerate blank lines.
        if (it->size() == 1 && it->front().empty()) continue;
        t.rows.push_back(std::move(*it));
    }
    return t;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    return read(in);
}

inline std::string escape(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << "\r\n";
}

inline void write(std::ostream& out, const Table& t) {
    write_row(out, t.header);
    for (const auto& row : t.rows) write_row(out, row);
}

inline void write_file(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    write(out, t);
}

}  // namespace svipipe::csv
