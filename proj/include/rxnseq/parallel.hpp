//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <functional>

namespace rxnseq {

// Worker cap: RXNSEQ_THREADS if set, otherwise hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous index blocks,
// one per worker. The first exception thrown by any worker is rethrown on
// the calling thread after all workers join. Callers must make fn(i) write
// only to slot i of any shared output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rxnseq
