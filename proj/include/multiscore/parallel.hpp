// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace multiscore {

/// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnvVar = "MULTISCORE_THREADS";

/// Positive integer from MULTISCORE_THREADS, otherwise 1. Throws
/// ValidationError when the variable is set to anything else.
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. On failure
/// the exception of the smallest failing index is rethrown, matching what a
/// sequential loop would report.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace multiscore
