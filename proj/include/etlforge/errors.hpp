// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace etlforge {

/// Bad dataflow definition, operator parameters, or run configuration.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while moving or processing data (missing file, malformed CSV,
/// operator runtime error). The CLI maps this to exit code 3.
class ExecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an ordering is requested on a graph that has a cycle.
/// `nodes` holds the ids of one offending cycle.
class CycleError : public ConfigError {
public:
    CycleError(const std::string& msg, std::vector<std::string> cycle_nodes)
        : ConfigError(msg), nodes(std::move(cycle_nodes)) {}

    std::vector<std::string> nodes;
};

} // namespace etlforge
