// Copyright 2026 The gmpsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace gmp {

/// Worker count: GMP_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) over up to worker_count() threads. Each index is
/// visited exactly once; fn must only write state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace gmp
