// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace robustmem {

// All randomness flows from one root seed through named streams, so that any
// sub-computation can be re-run in isolation and parallel loops can derive a
// private stream per index.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
  std::uint64_t s = root ^ fnv1a(name);
  return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name,
                                 std::uint64_t index) {
  std::uint64_t s = root ^ fnv1a(name);
  s = splitmix64(s) ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log argument.
  double u01_open() { return 1.0 - u01(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Box-Muller without caching, so results do not depend on call grouping.
  double normal() {
    double u1 = u01_open();
    double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t bits() { return eng_(); }

  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

  Eigen::VectorXd gaussian(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Uniform on the unit (n-1)-sphere.
  Eigen::VectorXd on_sphere(Eigen::Index n) {
    for (;;) {
      Eigen::VectorXd v = gaussian(n);
      double nrm = v.norm();
      if (nrm > 1e-12) return v / nrm;
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace robustmem
