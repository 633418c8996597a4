// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "robustmem/net.hpp"

namespace robustmem::gadgets {

using net::ReluNetwork;

// Certified parameters of an emitted gadget network. achieved_width/depth
// always equal the network's recomputed values.
struct GadgetSpec {
  double epsilon = 0.0;
  double p = 0.0;  // power/norm parameter when applicable, else 0
  int achieved_width = 0;
  int achieved_depth = 0;

  net::json to_json() const;
};

GadgetSpec gadget_spec_of(const ReluNetwork& n);

// |g(a) - a^2| <= epsilon on [0,1]; hidden width 3, depth ~ log2(1/eps)/2 + 2.
// g(a) = 0 for a <= 0 and grows linearly for a > 1.
ReluNetwork build_square(double epsilon);

// |h(a,b) - a*b| <= epsilon on [0,1]^2. Inputs are clamped to [0,1] first, so
// the bound holds against clamp(a)*clamp(b) for all real inputs and the
// gadget chains safely. Width 9.
ReluNetwork build_mult(double epsilon);

// |g(a) - a^p| <= epsilon on [0,1] for integer p >= 2; chained mults with the
// base carried alongside.
ReluNetwork build_power_nat(double epsilon, int p);

// |g(a) - a^p| <= epsilon on [0,1] for non-integer p in (1,inf); truncated
// shifted binomial series evaluated by build_poly with budget epsilon/2.
ReluNetwork build_power_frac(double epsilon, double p);

// Truncation degree used by build_power_frac.
int frac_power_degree(double epsilon, double p);

// Generalized binomial coefficients C(p,i), i = 0..D, by the ratio recurrence
// in extended precision.
std::vector<double> binomial_coeffs(double p, int D);

// |Phi(a) - sum_i coeffs[i] a^i| <= epsilon on [-1,1]; Horner scheme with one
// mult gadget per degree.
ReluNetwork build_poly(double epsilon, const std::vector<double>& coeffs);

// Approximate ball indicator (Def of f_{x0,w,p}): returns (f(x), x) with
//   f(x) = y0            if ||x - x0||_p <= r,
//   f(x) = 0             if ||x - x0||_p >= r + w,
//   f(x) in [0, y0]      everywhere.
// p in {1, inf} is exact; p in (1, inf) uses the matching power gadget with
// eps~ = w^p / (4 k (w+2r)^p). The network carries its own input_shift so the
// pass-through coordinates stay nonnegative.
ReluNetwork build_ball_indicator(const Eigen::VectorXd& x0, double y0, double r,
                                 double w, double p);

// Shift-free indicator core used inside memorizers: assumes the input is
// already shifted/clipped so that every coordinate of the verified domain is
// nonnegative and every |center| coordinate is >= w + 2r (clip safety).
// `power_gadget` must approximate t^p on [0,1] with error <= eps~ (null for
// p = inf). Output is (f, x).
ReluNetwork ball_indicator_core(const Eigen::VectorXd& shifted_center,
                                double y0, double r, double w, double p,
                                const ReluNetwork* power_gadget);

// The power gadget matching norm rho at accuracy eps_tilde: identity for
// rho=1, square for rho=2, natural/fractional power otherwise. rho=inf has no
// gadget (returns a 1-layer identity placeholder that callers must not use).
ReluNetwork power_gadget_for_norm(double rho, double eps_tilde);

// Step network psi of width 2: psi(t) = m exactly on [m-1/4, m+1/4] for every
// integer 1 <= m <= C.
ReluNetwork build_step(int C);

// (m_prev, z) -> max(m_prev, z), exact for nonnegative inputs.
ReluNetwork build_max_accumulator();

}  // namespace robustmem::gadgets
