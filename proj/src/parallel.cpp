// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace robustmem::par {

namespace {
std::atomic<Mode> g_mode{Mode::OpenMP};
std::atomic<int> g_cap{0};
}  // namespace

Mode mode() { return g_mode.load(std::memory_order_relaxed); }
void set_mode(Mode m) { g_mode.store(m, std::memory_order_relaxed); }

int thread_cap() { return g_cap.load(std::memory_order_relaxed); }
void set_thread_cap(int n) { g_cap.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

void init_from_env() {
  if (const char* t = std::getenv("ROBUSTMEM_THREADS")) {
    set_thread_cap(std::atoi(t));
  }
  if (const char* s = std::getenv("ROBUSTMEM_SERIAL")) {
    if (std::string(s) == "1") set_mode(Mode::Serial);
  }
}

}  // namespace robustmem::par
