// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "robustmem/data.hpp"
#include "robustmem/net.hpp"
#include "robustmem/projector.hpp"

namespace robustmem::memorizer {

using data::LabeledDataset;
using data::RobustnessSpec;
using net::ReluNetwork;

enum class Regime { possible, impossible, unknown, invalid_radius };

std::string regime_name(Regime r);

// Threshold constants of the width/radius trade-off and the resulting
// classification of one (N, d, k, p, q, delta, sigma) point.
struct BoundsReport {
  double a = 0.0;           // upper-bound constant a_{p,q,d}
  double b = 0.0;           // lower-bound constant b_{p,q,d} (2416 d^..)
  double radius_cap = 0.0;  // 1 / (2 c^+_{p,q}(d))
  // Width thresholds: memorization guaranteed above width_sufficient,
  // impossible below width_necessary (infinity / 0 when out of range).
  double width_sufficient = 0.0;
  double width_necessary = 0.0;
  // Per-k radius thresholds (NaN when k is outside the band).
  double sigma_bound_small_width = 0.0;  // a N^{-2/(k-6)}, 7 <= k <= d+5
  double sigma_bound_improved = 0.0;     // a sqrt(k-6) N^{-2/(k-6)}
  double sigma_bound_impossible = 0.0;   // b N^{-2/k}, k <= d-1
  Regime regime = Regime::unknown;

  net::json to_json() const;
};

BoundsReport bounds_report(int N, int d, int k, double p, double q,
                           double delta, double sigma);

// Explicit robust memorizer of width d + 3 + W(power gadget) (d+4 for the
// exact l1/linf routes): a chain of approximate ball indicators feeding a
// running max. The working norm is p for p in {1, inf} and q otherwise, with
// ball radius c^+_{p,rho}(d) sigma and measured rho-separation.
ReluNetwork build_fullwidth(const LabeledDataset& ds, const RobustnessSpec& spec);

struct SmallWidthOptions {
  int max_draws = 500;
  std::uint64_t seed = 1;
};

// Width-exactly-k memorizer: the scaled preserving projection T = P/eps into
// k-6 dimensions fused with a full-width memorizer of the projected data.
ReluNetwork build_smallwidth(const LabeledDataset& ds, const RobustnessSpec& spec,
                             int k, const SmallWidthOptions& opts = {});

// Recomputed architecture vs the construction's recorded formulas.
struct AccountingRecord {
  std::vector<int> arch;
  int width = 0;
  int depth = 0;
  int width_formula_value = 0;
  bool width_ok = false;
  double depth_bound = 0.0;  // meta constant * target formula value
  bool depth_ok = false;

  net::json to_json() const;
};

AccountingRecord width_depth_account(const ReluNetwork& net);

}  // namespace robustmem::memorizer
