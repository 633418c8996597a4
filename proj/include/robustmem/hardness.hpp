// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "robustmem/data.hpp"
#include "robustmem/net.hpp"

namespace robustmem::hardness {

using data::LabeledDataset;

// Two concentric sphere covers embedded in the first k+1 coordinates of R^d:
// inner class 1 = sigma-cover of the radius-r sphere, outer class 2 = r-cover
// of the radius-(r+delta) sphere, with r = sqrt(2 sigma delta).
struct HardInstance {
  LabeledDataset dataset;
  double r = 0.0;
  std::vector<Eigen::VectorXd> inner_centers;  // in R^d
  std::vector<Eigen::VectorXd> outer_centers;  // in R^d
  int k = 0;
  double sigma = 0.0;
  double delta = 0.0;
  double inner_cover_radius = 0.0;  // sigma
  double outer_cover_radius = 0.0;  // r
  bool meets_hypothesis = false;    // 2 sigma/delta > 4832 N^(-2/k)

  net::json to_json() const;
};

HardInstance hard_instance_from_json(const net::json& j,
                                     const LabeledDataset& ds);

struct CoverReport {
  double max_gap = 0.0;
  int n_samples = 0;
  double target_radius = 0.0;
  bool covered() const { return max_gap <= target_radius + 1e-6; }

  net::json to_json() const;
};

// Delta_k = sqrt(2) (5 k ln(k+1) sqrt(2 pi (k+1)))^(1/k).
double delta_k(int k);

// Farthest-point-sampling cover of the radius-R sphere boundary in R^(k+1)
// (the k-sphere). Keeps adding centers until the sampled gap is below rho
// (with slack), then continues to exactly `target_centers` when positive.
// Throws CoverError when max_centers is insufficient.
std::vector<Eigen::VectorXd> greedy_sphere_cover(int k, double R, double rho,
                                                 int max_centers,
                                                 std::uint64_t seed,
                                                 int target_centers = 0);

// Monte-Carlo cover check: max over sampled sphere points of the distance to
// the nearest center.
CoverReport verify_cover(const std::vector<Eigen::VectorXd>& centers, double R,
                         double rho, int n_samples, std::uint64_t seed);

HardInstance build_hard_instance(int N, int d, int k, double delta,
                                 double sigma, std::uint64_t seed);

// A point a in the sigma-ball of inner point i with M(b_j - a) ~ 0, i.e. a
// collision of the j-th outer point with the i-th inner neighborhood under M.
struct Witness {
  bool found = false;
  int j = -1;  // outer index (within outer points)
  int i = -1;  // inner index
  Eigen::VectorXd a;
  double residual = std::numeric_limits<double>::infinity();

  net::json to_json() const;
};

// Minimizes ||M(b_j - a)|| / ||b_j - a|| over a in B_2(x_i, sigma) by
// alternating projections between the kernel of M and the translated ball,
// seeded from kernel-geometry candidates plus random restarts. `inner` points
// carry the sigma-balls; `outer` points are taken exactly.
Witness witness_search(const Eigen::MatrixXd& M,
                       const std::vector<Eigen::VectorXd>& inner,
                       const std::vector<Eigen::VectorXd>& outer, double sigma,
                       double tol, int n_restarts, std::uint64_t seed,
                       int span_dims = 0);

// HardInstance front-end; requires numerical rank(M) <= d-1.
Witness witness_nonpreservation(const Eigen::MatrixXd& M,
                                const HardInstance& inst, double tol,
                                int n_restarts = 50, std::uint64_t seed = 1);

}  // namespace robustmem::hardness
