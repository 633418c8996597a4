// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0
//
// Compares the serial reference implementations of the parallel kernels with
// their OpenMP counterparts on medium-size workloads.

#include <chrono>
#include <cstdio>
#include <functional>

#include "robustmem/hardness.hpp"
#include "robustmem/memorizer.hpp"
#include "robustmem/parallel.hpp"
#include "robustmem/projector.hpp"
#include "robustmem/rng.hpp"
#include "robustmem/verifier.hpp"

using namespace robustmem;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  // One warmup, then best-of-reps.
  fn();
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, const std::function<void()>& fn, int reps) {
  par::set_mode(par::Mode::Serial);
  const double s = time_ms(fn, reps);
  par::set_mode(par::Mode::OpenMP);
  const double p = time_ms(fn, reps);
  std::printf("%-28s %10.2f ms %10.2f ms %7.2fx\n", name, s, p, s / p);
}

}  // namespace

int main() {
  par::init_from_env();
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  auto ds = data::gen_random_separated(30, 8, 4, 1.0, 2.0, 7);
  data::RobustnessSpec spec;
  spec.sigma = 0.2 * data::separation(ds, 2.0);
  auto f = memorizer::build_fullwidth(ds, spec);
  row("verify_robust 30x1100", [&] {
    verifier::verify_robust(f, ds, spec, 1000, 100, 3);
  }, 3);

  auto P = projector::sample_projection(24, 8, 5);
  Rng rng(6);
  Eigen::VectorXd v = rng.on_sphere(24);
  row("cap_min_bruteforce 2e5", [&] {
    projector::cap_min_bruteforce(P, v, 0.3, 200000, 9);
  }, 3);

  auto centers = hardness::greedy_sphere_cover(2, 1.0, 0.25, 400, 11);
  row("verify_cover 2e5", [&] {
    hardness::verify_cover(centers, 1.0, 0.25, 200000, 12);
  }, 3);

  auto inst = hardness::build_hard_instance(120, 6, 2, 1.0, 0.45, 13);
  Eigen::MatrixXd M = projector::sample_projection(6, 2, 14);
  row("witness restarts 400", [&] {
    hardness::witness_nonpreservation(M, inst, 1e-6, 400, 15);
  }, 3);

  // Non-preservable instance: every draw runs and fails, exercising the loop.
  row("projection draws 64", [&] {
    projector::try_find_preserving_projection(inst.dataset, inst.sigma, 2, 64,
                                              17);
  }, 3);
  return 0;
}
