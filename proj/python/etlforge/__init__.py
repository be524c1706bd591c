# Copyright 2026 The etlforge Authors
# SPDX-License-Identifier: Apache-2.0
"""ETL dataflow engine bindings.

The core is a C++ engine that partitions a dataflow DAG into execution
trees, runs each tree with a shared-cache pipelined scheme, and predicts
the optimal pipeline degree from a measured cost profile.
"""

from ._etlforge import (
    ConfigError,
    Dataflow,
    ExecError,
    __version__,
    find_staggering_activity,
    generate_ssb,
    optimal_degree,
    predict_pipeline_time,
    split_sizes,
)

__all__ = [
    "ConfigError",
    "Dataflow",
    "ExecError",
    "__version__",
    "find_staggering_activity",
    "generate_ssb",
    "optimal_degree",
    "predict_pipeline_time",
    "split_sizes",
]
