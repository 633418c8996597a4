// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "robustmem/data.hpp"
#include "robustmem/net.hpp"

namespace robustmem::projector {

using data::LabeledDataset;

// Margin of one cross-class pair under the sufficient center test:
// ||P vhat_ij|| - (epsilon + 2 sigma / ||x_i - x_j||).
struct PairMargin {
  int i = 0;
  int j = 0;
  double distance = 0.0;
  double margin = 0.0;
};

// A rank-k orthogonal projection P (orthonormal rows) together with the scale
// epsilon and the per-pair margins proving that T = P/epsilon preserves the
// dataset's sigma-neighborhoods. Valid iff every margin is positive.
struct ProjectionCertificate {
  Eigen::MatrixXd P;  // k x d, P P^T = I_k
  double epsilon = 0.0;
  double sigma = 0.0;
  std::vector<PairMargin> margins;
  int draws_used = 0;
  bool outside_guarantee = false;

  double min_margin() const;
  net::json to_json() const;
};

ProjectionCertificate certificate_from_json(const net::json& j);

// Haar-random k x d matrix with orthonormal rows (row-wise Gram-Schmidt with
// re-orthogonalization of an i.i.d. Gaussian matrix). Deterministic per seed.
Eigen::MatrixXd sample_projection(int d, int k, std::uint64_t seed);

// eps = (1/2) sqrt(k/(d e)) N^(-2/k); a draw certifies with this epsilon
// whenever 2 sigma / delta <= eps.
double required_epsilon(int N, int d, int k);

struct CertifyResult {
  std::optional<ProjectionCertificate> cert;
  std::vector<PairMargin> violations;
  bool success() const { return cert.has_value(); }
};

// Sufficient center-margin test (per cross-class pair, cap radius
// arcsin(2 sigma / distance)). Requires sigma < separation(ds,2)/2 and
// epsilon in (0, 1/2].
CertifyResult certify(const Eigen::MatrixXd& P, const LabeledDataset& ds,
                      double sigma, double epsilon);

struct SearchResult {
  std::optional<ProjectionCertificate> cert;
  int draws_attempted = 0;
  bool outside_guarantee = false;
};

// Draw-and-certify with epsilon = required_epsilon(N, d, k); draws run in
// parallel batches, and the smallest certifying draw index wins so the result
// is mode-independent.
SearchResult try_find_preserving_projection(const LabeledDataset& ds,
                                            double sigma, int k, int max_draws,
                                            std::uint64_t seed);

// Throwing wrapper: SearchError when max_draws is exhausted.
ProjectionCertificate find_preserving_projection(const LabeledDataset& ds,
                                                 double sigma, int k,
                                                 int max_draws,
                                                 std::uint64_t seed);

// T = P / epsilon as a single affine layer.
net::AffineLayer scale_to_preserving(const ProjectionCertificate& cert);

// Min of ||P s|| over sampled points s of the geodesic cap of radius phi
// around v_hat (test oracle for the cap-margin condition). Includes the cap
// center and rim among the samples.
double cap_min_bruteforce(const Eigen::MatrixXd& P,
                          const Eigen::VectorXd& v_hat, double phi,
                          int n_samples, std::uint64_t seed);

// Orthogonal-projection form of an arbitrary rank-k linear map via SVD:
// returns (P, epsilon = 1/s_max) such that M preserving implies
// ||P v|| >= epsilon ||v|| on the preserved set. epsilon may exceed 1/2 for
// poorly scaled maps; it is meant for margin testing, not as a certificate.
struct OrthogonalForm {
  Eigen::MatrixXd P;
  double epsilon = 0.0;
};
OrthogonalForm orthogonal_form(const Eigen::MatrixXd& M);

// Max over distinct dataset points of | ||T(x)-T(x')|| - ||x-x'|| |.
double jl_pairwise_max_deviation(const Eigen::MatrixXd& T,
                                 const LabeledDataset& ds);

// The explicit distance-preserving but neighborhood-collapsing map
// (a_1 - a_2/sigma) e_1 + sum_{i=2..k} a_{i+1} e_i, defined for k <= d-1.
Eigen::MatrixXd jl_counterexample_map(int d, int k, double sigma);

}  // namespace robustmem::projector
