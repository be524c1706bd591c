// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "etlforge/cache.hpp"
#include "etlforge/schema.hpp"

namespace etlforge {

// Dialect: comma delimiter, one row per line, trailing newline. Numerics and
// booleans unquoted; text quoted with double quotes only when it contains the
// delimiter, a quote, or is empty; embedded quotes double. Empty unquoted
// field = null. Embedded newlines are not supported.

/// Format one cell for a delimited text file.
std::string format_csv_field(const Value& v, char delim = ',');

/// Parse a whole file against a schema. Errors carry the 1-based line (and
/// column) of the offending cell.
std::vector<Row> read_csv(const std::filesystem::path& path, const Schema& schema);

/// Number of data rows in a file (no type coercion).
std::uint64_t count_csv_rows(const std::filesystem::path& path);

/// Stream the file as caches of at most batch_rows rows, in file order.
/// Returns total rows scanned. `keep` (optional) subsamples rows by index.
std::uint64_t csv_source_scan(const std::filesystem::path& path, const Schema& schema,
                              std::size_t batch_rows,
                              const std::function<void(CachePtr)>& emit,
                              const std::function<bool(std::uint64_t)>& keep = {});

/// Append rows as delimited text; returns the row count written.
std::uint64_t write_rows_text(std::ostream& os, std::span<const Row> rows, char delim = ',');

} // namespace etlforge
