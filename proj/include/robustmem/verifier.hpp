// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "robustmem/data.hpp"
#include "robustmem/hardness.hpp"
#include "robustmem/net.hpp"

namespace robustmem::verifier {

using data::LabeledDataset;
using data::RobustnessSpec;
using net::ReluNetwork;

// Sampled evidence for the robust-memorization contract: sampling cannot
// prove the universal statement, so reports carry their sample counts and
// seed; constructed networks additionally carry certified gadget error
// budgets in meta, which is the actual guarantee chain.
struct PointResult {
  int index = 0;
  int n_samples = 0;
  int n_fail = 0;
  double worst_dev = 0.0;
};

struct RobustnessReport {
  std::vector<PointResult> per_point;
  double worst_dev = 0.0;
  int n_interior = 0;
  int n_boundary = 0;
  std::uint64_t seed = 0;
  bool pass = false;  // worst_dev <= 1e-9 over all points and samples

  net::json to_json() const;
};

// Extra evaluation points injected into a data point's sample set (used to
// replay obstruction witnesses through the sampler).
struct InjectedPoint {
  int index;
  Eigen::VectorXd x;
};

RobustnessReport verify_robust(const ReluNetwork& net, const LabeledDataset& ds,
                               const RobustnessSpec& spec, int n_interior,
                               int n_boundary, std::uint64_t seed,
                               const std::vector<InjectedPoint>& injected = {});

struct ObstructionReport {
  bool attempted = false;  // false when the first layer has full rank d
  bool found = false;
  int inner_index = -1;
  int outer_index = -1;
  Eigen::VectorXd a_inner;
  Eigen::VectorXd a_outer;
  double residual = 0.0;
  double out_inner = 0.0;
  double out_outer = 0.0;
  bool outputs_equal = false;  // within 1e-9

  net::json to_json() const;
};

// Runs the non-preservation witness search against the rank of the net's
// first-layer weights; a found witness gives two differently labeled ball
// points that the whole network maps to equal outputs.
ObstructionReport verify_first_layer_obstruction(const ReluNetwork& net,
                                                 const LabeledDataset& ds,
                                                 const RobustnessSpec& spec,
                                                 int n_restarts = 50,
                                                 std::uint64_t seed = 1);

}  // namespace robustmem::verifier
