// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "robustmem/errors.hpp"

namespace robustmem::data {

// Points in R^d with integer class labels in {1..C}. Labels start at 1 because
// indicator outputs and the max accumulator assume positive label values.
struct LabeledDataset {
  Eigen::MatrixXd X;        // d x N, one point per column
  std::vector<int> labels;  // size N

  int n() const { return static_cast<int>(X.cols()); }
  int dim() const { return static_cast<int>(X.rows()); }
  int num_classes() const;

  // N >= 1, d >= 1, labels in {1..C}, and no two points with different labels
  // are equal.
  void validate() const;
};

// Robustness-radius norm p, radius sigma, and separation norm q (default 2).
struct RobustnessSpec {
  double p = 2.0;
  double sigma = 0.0;
  double q = 2.0;

  void validate() const;
};

// ||v||_p for p in (0, inf]; a quasi-norm for p < 1.
double lp_norm(const Eigen::VectorXd& v, double p);

// Minimum cross-class l_q distance. Throws UsageError on single-class data.
double separation(const LabeledDataset& ds, double q);

// c^+_{p,q}(d) = d^{[1/q - 1/p]_+} and c^-_{p,q}(d) = d^{[1/q - 1/p]_-},
// with 1/inf = 0.
double c_plus(double p, double q, int d);
double c_minus(double p, double q, int d);
enum class NormSign { plus, minus };
double norm_constant(NormSign sign, double p, double q, int d);

struct RadiusVerdict {
  bool feasible = false;
  double threshold = 0.0;  // 1 / (2 c^+_{p,q}(d))
  double ratio = 0.0;      // sigma / delta
};

// Feasible iff sigma/delta < 1/(2 c^+_{p,q}(d)).
RadiusVerdict validate_radius(const RobustnessSpec& spec, double delta, int d);

// Rejection-sampled dataset with cross-class l_q separation >= delta.
// Deterministic given seed.
LabeledDataset gen_random_separated(int N, int d, int C, double delta, double q,
                                    std::uint64_t seed);

enum class BallMode { interior, boundary };

// n points of the closed l_p ball around `center` (boundary mode: at radius r
// up to 1e-9). Mixes normalized random directions with exact axis extremes,
// and sign corners for p = inf. Deterministic given seed.
Eigen::MatrixXd ball_sample(const Eigen::VectorXd& center, double r, double p,
                            int n, std::uint64_t seed, BallMode mode);

// CSV with header "x1,...,xd,label", one row per point.
void save_csv(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_csv(const std::string& path);

}  // namespace robustmem::data
