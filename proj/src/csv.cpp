// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "etlforge/errors.hpp"

namespace etlforge {

namespace {

[[noreturn]] void bad_line(const std::filesystem::path& path, std::uint64_t line,
                           const std::string& what) {
    throw ExecError(path.string() + ":" + std::to_string(line) + ": " + what);
}

/// Split one line into raw fields; quoted[i] records whether field i was quoted.
void split_line(const std::filesystem::path& path, std::uint64_t line_no, const std::string& line,
                std::vector<std::string>& fields, std::vector<bool>& quoted) {
    fields.clear();
    quoted.clear();
    std::string cur;
    bool in_quotes = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) bad_line(path, line_no, "unexpected quote inside unquoted field");
            in_quotes = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            quoted.push_back(was_quoted);
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) bad_line(path, line_no, "unterminated quoted field");
    fields.push_back(std::move(cur));
    quoted.push_back(was_quoted);
}

Value coerce(const std::filesystem::path& path, std::uint64_t line_no, std::size_t col,
             const Column& column, const std::string& field, bool was_quoted) {
    if (field.empty() && !was_quoted) return Value{}; // null
    switch (column.kind) {
    case ValueKind::Integer: {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || p != field.data() + field.size()) {
            bad_line(path, line_no,
                     "column " + std::to_string(col + 1) + " ('" + column.name +
                         "'): cannot parse '" + field + "' as integer");
        }
        return Value(v);
    }
    case ValueKind::Decimal: {
        double v = 0;
        auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || p != field.data() + field.size()) {
            bad_line(path, line_no,
                     "column " + std::to_string(col + 1) + " ('" + column.name +
                         "'): cannot parse '" + field + "' as decimal");
        }
        return Value(v);
    }
    case ValueKind::Boolean:
        if (field == "true") return Value(true);
        if (field == "false") return Value(false);
        bad_line(path, line_no,
                 "column " + std::to_string(col + 1) + " ('" + column.name +
                     "'): cannot parse '" + field + "' as boolean");
    case ValueKind::Text:
        return Value(field);
    }
    bad_line(path, line_no, "unreachable");
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ExecError("cannot open file: " + path.string());
    return in;
}

} // namespace

std::string format_csv_field(const Value& v, char delim) {
    if (v.index() != 3) return value_to_string(v);
    const std::string& s = std::get<std::string>(v);
    bool need_quotes = s.empty() || s.find(delim) != std::string::npos ||
                       s.find('"') != std::string::npos;
    if (!need_quotes) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::uint64_t csv_source_scan(const std::filesystem::path& path, const Schema& schema,
                              std::size_t batch_rows, const std::function<void(CachePtr)>& emit,
                              const std::function<bool(std::uint64_t)>& keep) {
    if (batch_rows < 1) throw ConfigError("batch_rows must be >= 1");
    std::ifstream in = open_input(path);
    std::string line;
    std::vector<std::string> fields;
    std::vector<bool> quoted;
    std::vector<Row> batch;
    batch.reserve(batch_rows);
    std::uint64_t line_no = 0, scanned = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (keep && !keep(line_no - 1)) continue;
        split_line(path, line_no, line, fields, quoted);
        if (fields.size() != schema.size()) {
            bad_line(path, line_no,
                     "expected " + std::to_string(schema.size()) + " fields, found " +
                         std::to_string(fields.size()));
        }
        Row row(schema.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            row[i] = coerce(path, line_no, i, schema.at(i), fields[i], quoted[i]);
        }
        batch.push_back(std::move(row));
        ++scanned;
        if (batch.size() == batch_rows) {
            emit(make_cache(schema, std::move(batch)));
            batch = {};
            batch.reserve(batch_rows);
        }
    }
    if (!batch.empty()) emit(make_cache(schema, std::move(batch)));
    return scanned;
}

std::vector<Row> read_csv(const std::filesystem::path& path, const Schema& schema) {
    std::vector<Row> rows;
    csv_source_scan(path, schema, 4096, [&](CachePtr c) {
        for (auto& r : c->rows) rows.push_back(std::move(r));
    });
    return rows;
}

std::uint64_t count_csv_rows(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::uint64_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ++n;
    }
    return n;
}

std::uint64_t write_rows_text(std::ostream& os, std::span<const Row> rows, char delim) {
    std::string line;
    for (const Row& row : rows) {
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line.push_back(delim);
            line += format_csv_field(row[i], delim);
        }
        line.push_back('\n');
        os.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    return rows.size();
}

} // namespace etlforge
