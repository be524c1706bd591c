// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cassert>
#include <cstddef>
#include <memory>
#include <vector>

#include "etlforge/schema.hpp"

namespace etlforge {

/// A batch of rows handed exclusively between activities. split_index is
/// which horizontal split of the tree root's output this is; stage_index
/// counts how many activities have processed it.
///
/// Exclusive handoff is the contract: at most one execution unit holds a
/// cache at any instant. Caches move as unique_ptr, and acquire/release
/// tokens assert the contract in debug builds.
struct SharedCache {
    Schema schema;
    std::vector<Row> rows;
    std::size_t split_index = 0;
    std::size_t stage_index = 0;

    SharedCache() = default;
    SharedCache(Schema s, std::vector<Row> r, std::size_t split = 0, std::size_t stage = 0)
        : schema(std::move(s)), rows(std::move(r)), split_index(split), stage_index(stage) {}

    SharedCache(const SharedCache&) = delete;
    SharedCache& operator=(const SharedCache&) = delete;

    void acquire(const void* who) {
        const void* expected = nullptr;
        bool ok = owner_.compare_exchange_strong(expected, who);
        assert(ok && "cache already held by another activity");
        (void)ok;
    }
    void release(const void* who) {
        const void* expected = who;
        bool ok = owner_.compare_exchange_strong(expected, nullptr);
        assert(ok && "cache released by a non-owner");
        (void)ok;
    }

private:
    std::atomic<const void*> owner_{nullptr};
};

using CachePtr = std::unique_ptr<SharedCache>;

inline CachePtr make_cache(Schema schema, std::vector<Row> rows = {},
                           std::size_t split = 0, std::size_t stage = 0) {
    return std::make_unique<SharedCache>(std::move(schema), std::move(rows), split, stage);
}

/// Deep copy into a fresh buffer (the separate-cache baseline handoff).
inline CachePtr copy_cache(const SharedCache& c) {
    return std::make_unique<SharedCache>(c.schema, c.rows, c.split_index, c.stage_index);
}

} // namespace etlforge
