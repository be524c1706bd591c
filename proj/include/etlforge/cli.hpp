// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace etlforge {

/// Parse and dispatch the command line. Exit codes: 0 success, 2 spec or
/// configuration error, 3 runtime/data error. Errors print a JSON object on
/// the error stream.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace etlforge
