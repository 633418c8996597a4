// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace robustmem::par {

// Every parallel kernel in this project is a loop of pure per-index writes
// followed by a serial reduction, so Serial and OpenMP modes produce
// bit-identical results. Serial is kept as the reference implementation for
// testing; the bench tool compares the two.
enum class Mode { Serial, OpenMP };

Mode mode();
void set_mode(Mode m);

// 0 means "runtime default". Mirrors the CLI --threads flag and the
// ROBUSTMEM_THREADS environment variable.
int thread_cap();
void set_thread_cap(int n);

// Reads ROBUSTMEM_THREADS / ROBUSTMEM_SERIAL once at startup.
void init_from_env();

template <class F>
void for_index(std::int64_t n, F&& f) {
  if (mode() == Mode::OpenMP) {
#ifdef _OPENMP
    const int cap = thread_cap();
#pragma omp parallel for schedule(static) num_threads(cap > 0 ? cap : omp_get_max_threads())
    for (std::int64_t i = 0; i < n; ++i) f(i);
    return;
#endif
  }
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace robustmem::par
