// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "robustmem/errors.hpp"

namespace robustmem::net {

using json = nlohmann::json;

// One affine map T(x) = W x + b of a feedforward ReLU network.
struct AffineLayer {
  Eigen::MatrixXd W;  // d_out x d_in
  Eigen::VectorXd b;  // d_out

  int in_dim() const { return static_cast<int>(W.cols()); }
  int out_dim() const { return static_cast<int>(W.rows()); }
};

/// A feedforward ReLU network: affine layers with elementwise ReLU between
/// them and none after the last. `input_shift` is added to the input before
/// the first layer; constructions use it to keep pass-through coordinates
/// nonnegative on their verified domain, and it is kept as a separate field
/// (rather than folded into the first bias) so serialized networks stay
/// self-describing. `meta` is a free-form construction record (gadget names,
/// width/depth formulas, target constants).
///
/// Networks are immutable once built; eval and serialize take const references
/// and are safe for any number of concurrent readers.
struct ReluNetwork {
  std::vector<AffineLayer> layers;
  Eigen::VectorXd input_shift;  // size d0, or empty for zero shift
  json meta = json::object();

  int input_dim() const;
  int output_dim() const;
  int depth() const { return static_cast<int>(layers.size()); }
  // Max hidden dimension d_1..d_{L-1}; 0 when there are no hidden layers.
  int width() const;
  std::vector<int> architecture() const;  // (d_0, ..., d_L)

  // Checks layer chaining, shift length and entry finiteness.
  void validate() const;
};

Eigen::VectorXd eval_vec(const ReluNetwork& net, const Eigen::VectorXd& x);

// Scalar evaluation; requires output dimension 1.
double eval(const ReluNetwork& net, const Eigen::VectorXd& x);

// Evaluates all columns of X at once (d0 x n in, dL x n out).
Eigen::MatrixXd eval_batch(const ReluNetwork& net, const Eigen::MatrixXd& X);

// Functional composition second(first(x)). The junction fuses first's last
// affine with second's first affine (and second's input_shift), so no ReLU is
// inserted and depth(first) + depth(second) - 1 results.
ReluNetwork compose(const ReluNetwork& first, const ReluNetwork& second);

// Pads every hidden layer to exactly k neurons with zero in/out weights.
// Requires k >= width(net) and at least one hidden layer when k > width.
ReluNetwork pad_width(const ReluNetwork& net, int k);

// JSON serialization. Weights are encoded as hexadecimal float strings for
// bit-exact round trips, with decimal mirror fields for human reading.
std::string serialize(const ReluNetwork& net);
ReluNetwork deserialize(const std::string& text);

// --- construction helpers -------------------------------------------------
//
// The builders below assemble networks from small blocks. Blocks are glued
// with compose(), which fuses affine junctions, so a permutation or
// duplication layer costs no depth. stack() and relu_identity() pass values
// through hidden ReLU layers and therefore require the carried values to be
// nonnegative on the domain of interest; every construction in this project
// arranges that via input_shift.

// A single affine layer as a network (depth 1).
ReluNetwork affine_net(const Eigen::MatrixXd& W, const Eigen::VectorXd& b);

// Identity on the nonnegative orthant, `depth` layers (depth-1 ReLU
// applications).
ReluNetwork relu_identity(int dims, int depth);

// Block-diagonal parallel composition; all parts must have equal depth.
ReluNetwork stack(std::span<const ReluNetwork> parts);
ReluNetwork stack(const ReluNetwork& a, const ReluNetwork& b);
ReluNetwork stack(const ReluNetwork& a, const ReluNetwork& b,
                  const ReluNetwork& c);

// Front-pads with relu_identity so the result has exactly `depth` layers.
// Requires nonnegative inputs on the domain of interest.
ReluNetwork with_depth(const ReluNetwork& n, int depth);

}  // namespace robustmem::net
