// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/gadgets.hpp"

#include <cmath>

namespace robustmem::gadgets {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using net::affine_net;
using net::compose;
using net::json;
using net::relu_identity;
using net::stack;
using net::with_depth;

namespace {

void finalize_spec(ReluNetwork& n, const char* name, double epsilon, double p) {
  json spec;
  spec["name"] = name;
  spec["epsilon"] = epsilon;
  spec["p"] = p;
  spec["achieved_width"] = n.width();
  spec["achieved_depth"] = n.depth();
  n.meta["gadget_spec"] = std::move(spec);
}

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.begin()->size());
  MatrixXd m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

net::json GadgetSpec::to_json() const {
  return json{{"epsilon", epsilon},
              {"p", p},
              {"achieved_width", achieved_width},
              {"achieved_depth", achieved_depth}};
}

GadgetSpec gadget_spec_of(const ReluNetwork& n) {
  GadgetSpec s;
  if (n.meta.contains("gadget_spec")) {
    const auto& j = n.meta["gadget_spec"];
    s.epsilon = j.value("epsilon", 0.0);
    s.p = j.value("p", 0.0);
    s.achieved_width = j.value("achieved_width", 0);
    s.achieved_depth = j.value("achieved_depth", 0);
  }
  return s;
}

// Dyadic refinement of the piecewise-linear interpolant of a^2: the hat
// function h(t) = 2[t]_+ - 4[t-1/2]_+ is iterated m times and the partial sum
// P_s = a - sum_{j<=s} h^j(a)/4^j is carried in-layer, giving hidden width 3
// (hat value, shifted hat, partial sum) and uniform error 4^-(m+1) on [0,1].
ReluNetwork build_square(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw UsageError("build_square: epsilon must be in (0, 1/2)");
  const int m = std::max(
      1, static_cast<int>(std::ceil(std::log2(1.0 / epsilon) / 2.0)) - 1);

  ReluNetwork n;
  // Layer 1: u = [a]_+, v = [a - 1/2]_+, w = [a]_+.
  n.layers.push_back({mat({{1.0}, {1.0}, {1.0}}), vec({0.0, -0.5, 0.0})});
  double scale = 0.25;  // 1 / 4^s
  for (int s = 2; s <= m; ++s) {
    // t_s = 2u - 4v; u' = [t_s]_+, v' = [t_s - 1/2]_+, w' = [w - t_s/4^(s-1)]_+.
    MatrixXd W = mat({{2.0, -4.0, 0.0},
                      {2.0, -4.0, 0.0},
                      {-2.0 * scale, 4.0 * scale, 1.0}});
    n.layers.push_back({W, vec({0.0, -0.5, 0.0})});
    scale *= 0.25;
  }
  // Output: P_m = w - (2u - 4v)/4^m.
  n.layers.push_back({mat({{-2.0 * scale, 4.0 * scale, 1.0}}), vec({0.0})});

  n.meta["iterations"] = m;
  n.meta["error_bound"] = std::pow(4.0, -(m + 1));
  n.meta["depth_constants"] = json{{"C_sq", 0.5}, {"C0", 2.0}};
  finalize_spec(n, "square", epsilon, 2.0);
  return n;
}

// a*b = 2 s^2 - a^2/2 - b^2/2 with s = (a+b)/2, evaluated by three square
// gadgets after clamping both inputs to [0,1]. Budgets (eps/6, 2eps/3, 2eps/3)
// make each square contribute eps/3 through the output coefficients (2, 1/2,
// 1/2).
ReluNetwork build_mult(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw UsageError("build_mult: epsilon must be in (0, 1/2)");
  ReluNetwork sq_s = build_square(epsilon / 6.0);
  ReluNetwork sq_a = build_square(2.0 * epsilon / 3.0);
  ReluNetwork sq_b = sq_a;
  const int L = std::max(sq_s.depth(), sq_a.depth());

  // Clamp neurons [a]_+, [a-1]_+, [b]_+, [b-1]_+.
  ReluNetwork clamp = compose(
      affine_net(mat({{1, 0}, {1, 0}, {0, 1}, {0, 1}}), vec({0, -1, 0, -1})),
      relu_identity(4, 2));
  // s = (clamp(a)+clamp(b))/2, then the three inputs for the squares.
  ReluNetwork fan = affine_net(
      mat({{0.5, -0.5, 0.5, -0.5}, {1, -1, 0, 0}, {0, 0, 1, -1}}),
      vec({0, 0, 0}));
  ReluNetwork squares =
      stack(with_depth(sq_s, L), with_depth(sq_a, L), with_depth(sq_b, L));
  ReluNetwork out = affine_net(mat({{2.0, -0.5, -0.5}}), vec({0.0}));

  ReluNetwork n = compose(compose(compose(clamp, fan), squares), out);
  n.meta["budget_split"] = json{{"sum_square", epsilon / 6.0},
                                {"input_squares", 2.0 * epsilon / 3.0}};
  finalize_spec(n, "mult", epsilon, 0.0);
  return n;
}

ReluNetwork build_power_nat(double epsilon, int p) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw UsageError("build_power_nat: epsilon must be in (0, 1/2)");
  if (p < 2) throw UsageError("build_power_nat: p must be an integer >= 2");
  const double eps2 = epsilon / (p - 1);
  ReluNetwork mult = build_mult(eps2);

  ReluNetwork n;
  if (p == 2) {
    n = compose(affine_net(mat({{1.0}, {1.0}}), vec({0, 0})), mult);
  } else {
    // State (G, a); each step maps it to (clamp(G)*a +- eps2, a).
    ReluNetwork dup = affine_net(mat({{1, 0}, {0, 1}, {0, 1}}), vec({0, 0, 0}));
    ReluNetwork step =
        compose(dup, stack(mult, relu_identity(1, mult.depth())));
    n = affine_net(mat({{1.0}, {1.0}}), vec({0, 0}));
    for (int i = 0; i < p - 1; ++i) n = compose(n, step);
    n = compose(n, affine_net(mat({{1.0, 0.0}}), vec({0.0})));
  }
  n.meta["per_mult_epsilon"] = eps2;
  finalize_spec(n, "power_nat", epsilon, static_cast<double>(p));
  return n;
}

int frac_power_degree(double epsilon, double p) {
  const int fl = static_cast<int>(std::floor(p));
  return static_cast<int>(
             std::ceil(p * std::pow(M_PI * epsilon / 2.0, -1.0 / fl))) +
         2;
}

std::vector<double> binomial_coeffs(double p, int D) {
  std::vector<double> c(D + 1);
  long double cur = 1.0L;
  c[0] = 1.0;
  for (int i = 1; i <= D; ++i) {
    cur *= static_cast<long double>(p - i + 1) / static_cast<long double>(i);
    c[i] = static_cast<double>(cur);
  }
  return c;
}

ReluNetwork build_power_frac(double epsilon, double p) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw UsageError("build_power_frac: epsilon must be in (0, 1)");
  if (!(p > 1.0) || p == std::floor(p))
    throw UsageError(
        "build_power_frac: p must be non-integer in (1, inf); use "
        "build_power_nat for integer p");
  const int D = frac_power_degree(epsilon, p);
  const std::vector<double> coeffs = binomial_coeffs(p, D);
  ReluNetwork poly = build_poly(epsilon / 2.0, coeffs);
  // g(a) = Phi(a - 1).
  ReluNetwork n = compose(affine_net(mat({{1.0}}), vec({-1.0})), poly);
  n.meta["series_degree"] = D;
  n.meta["poly_meta"] = poly.meta;
  finalize_spec(n, "power_frac", epsilon, p);
  return n;
}

// Horner scheme: H_D = c_D, H_s = c_s + a*H_{s+1}. Each product is computed by
// one mult gadget on inputs renormalized into [0,1]: a -> (a+1)/2 and
// H -> (H+R)/(2R) with R = B(D+1)+1, reconstructed by
// a*H = 4R*m - 2R*abar - 2R*hbar + R. Each step therefore amplifies the mult
// error by 4R, so the per-step budget is eps/(4 R D).
ReluNetwork build_poly(double epsilon, const std::vector<double>& coeffs) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw UsageError("build_poly: epsilon must be in (0, 1/2)");
  if (coeffs.empty()) throw UsageError("build_poly: empty coefficient list");
  const int D = static_cast<int>(coeffs.size()) - 1;
  double B = 0.0;
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw UsageError("build_poly: non-finite coefficient");
    B = std::max(B, std::fabs(c));
  }

  ReluNetwork n;
  if (D == 0 || B == 0.0) {
    n = affine_net(MatrixXd::Zero(1, 1), vec({coeffs[0]}));
    n.meta["degree"] = D;
    finalize_spec(n, "poly", epsilon, 0.0);
    return n;
  }

  const double R = B * (D + 1) + 1.0;
  const double eps_step = epsilon / (4.0 * R * D);
  ReluNetwork mult = build_mult(std::min(0.25, eps_step));

  // Entry: abar = (a+1)/2, hbar = (c_D + R)/(2R).
  n = affine_net(mat({{0.5}, {0.0}}), vec({0.5, (coeffs[D] + R) / (2.0 * R)}));
  ReluNetwork dup = affine_net(mat({{1, 0}, {0, 1}, {1, 0}, {0, 1}}),
                               vec({0, 0, 0, 0}));
  ReluNetwork block = stack(mult, relu_identity(2, mult.depth()));
  for (int s = D - 1; s >= 0; --s) {
    ReluNetwork comb = affine_net(
        mat({{0, 1, 0}, {2, -1, -1}}),
        vec({0.0, (coeffs[s] + 2.0 * R) / (2.0 * R)}));
    n = compose(compose(compose(n, dup), block), comb);
  }
  n = compose(n, affine_net(mat({{0.0, 2.0 * R}}), vec({-R})));
  n.meta["degree"] = D;
  n.meta["coeff_bound"] = B;
  n.meta["range_half_width"] = R;
  n.meta["per_step_epsilon"] = eps_step;
  n.meta["budget_formula"] = "eps/(4*R*D), R = B*(D+1)+1";
  finalize_spec(n, "poly", epsilon, 0.0);
  return n;
}

ReluNetwork power_gadget_for_norm(double rho, double eps_tilde) {
  if (std::isinf(rho))
    throw UsageError("p = inf has no power gadget; the max route is exact");
  if (rho == 1.0) return relu_identity(1, 2);
  if (rho == 2.0) return build_square(eps_tilde);
  if (rho > 1.0 && rho == std::floor(rho))
    return build_power_nat(eps_tilde, static_cast<int>(rho));
  if (rho > 1.0) return build_power_frac(eps_tilde, rho);
  throw UsageError("no power gadget for norms with p < 1");
}

namespace {

// One coordinate stage of the finite-p indicator. Channel layout entering a
// stage (as the pending affine output): (x[0..k-1], Sigma, pos_j, neg_j).
// The stage runs the power gadget on b = (pos+neg)/dloc while carrying the
// penalty c = [2b - 1]_+, materializes eta = [dloc^p * gamma]_+, and folds
// s_j = eta + (r^p + 3/4 w^p) c into Sigma.
ReluNetwork indicator_stage(int k, int j_next, const VectorXd& center,
                            double dloc, double rp_coeff, double p,
                            const ReluNetwork& gadget) {
  const int Lg = gadget.depth();
  // (pos, neg) -> pending (dloc^p * gamma, c).
  ReluNetwork rhs = compose(
      affine_net(mat({{1.0 / dloc, 1.0 / dloc}, {2.0 / dloc, 2.0 / dloc}}),
                 vec({0.0, -1.0})),
      stack(gadget, relu_identity(1, Lg)));
  rhs = compose(rhs, affine_net(mat({{std::pow(dloc, p), 0.0}, {0.0, 1.0}}),
                                vec({0.0, 0.0})));
  // Materialize the incoming (x, Sigma, pos, neg) before anything reads them:
  // pos/neg arrive as raw affine values and only become |a|_+ halves after
  // this ReLU.
  ReluNetwork core = compose(relu_identity(k + 3, 2),
                             stack(relu_identity(k + 1, rhs.depth()), rhs));
  core = compose(core, relu_identity(k + 3, 2));

  // Transition: Sigma' = Sigma + eta + rp_coeff * c, then next (pos, neg) or
  // the bare (x, Sigma) interface after the last coordinate.
  const int out_dim = (j_next < k) ? k + 3 : k + 1;
  MatrixXd T = MatrixXd::Zero(out_dim, k + 3);
  VectorXd tb = VectorXd::Zero(out_dim);
  for (int i = 0; i < k; ++i) T(i, i) = 1.0;
  T(k, k) = 1.0;
  T(k, k + 1) = 1.0;       // + eta
  T(k, k + 2) = rp_coeff;  // + penalty
  if (j_next < k) {
    T(k + 1, j_next) = 1.0;
    tb[k + 1] = -center[j_next];
    T(k + 2, j_next) = -1.0;
    tb[k + 2] = center[j_next];
  }
  return compose(core, affine_net(T, tb));
}

ReluNetwork indicator_core_finite_p(const VectorXd& center, double y0, double r,
                                    double w, double p,
                                    const ReluNetwork& gadget) {
  const int k = static_cast<int>(center.size());
  const double dloc = w + 2.0 * r;
  const double rp_coeff = std::pow(r, p) + 0.75 * std::pow(w, p);

  // Entry affine: (x) -> (x, Sigma=0, pos_1, neg_1).
  MatrixXd E = MatrixXd::Zero(k + 3, k);
  VectorXd eb = VectorXd::Zero(k + 3);
  for (int i = 0; i < k; ++i) E(i, i) = 1.0;
  E(k + 1, 0) = 1.0;
  eb[k + 1] = -center[0];
  E(k + 2, 0) = -1.0;
  eb[k + 2] = center[0];
  ReluNetwork n = affine_net(E, eb);

  for (int j = 0; j < k; ++j)
    n = compose(n, indicator_stage(k, j + 1, center, dloc, rp_coeff, p, gadget));

  // Head: f = [y0 (1 - [Sigma - r^p - w^p/4]_+ / (w^p/2))]_+, output (f, x).
  MatrixXd H1 = MatrixXd::Identity(k + 1, k + 1);
  VectorXd h1 = VectorXd::Zero(k + 1);
  h1[k] = -(std::pow(r, p) + std::pow(w, p) / 4.0);
  n = compose(n, affine_net(H1, h1));
  n = compose(n, relu_identity(k + 1, 2));
  MatrixXd H2 = MatrixXd::Identity(k + 1, k + 1);
  VectorXd h2 = VectorXd::Zero(k + 1);
  H2(k, k) = -2.0 * y0 / std::pow(w, p);
  h2[k] = y0;
  n = compose(n, affine_net(H2, h2));
  n = compose(n, relu_identity(k + 1, 2));
  MatrixXd O = MatrixXd::Zero(k + 1, k + 1);
  O(0, k) = 1.0;
  for (int i = 0; i < k; ++i) O(i + 1, i) = 1.0;
  n = compose(n, affine_net(O, VectorXd::Zero(k + 1)));
  return n;
}

// Exact l_inf indicator: running max of |x_j - c_j| via the accumulator
// recursion, then the two-hinge head. Width k+3.
ReluNetwork indicator_core_inf(const VectorXd& center, double y0, double r,
                               double w) {
  const int k = static_cast<int>(center.size());
  // Entry affine: (x) -> (x, m=0, pos_1, neg_1).
  MatrixXd E = MatrixXd::Zero(k + 3, k);
  VectorXd eb = VectorXd::Zero(k + 3);
  for (int i = 0; i < k; ++i) E(i, i) = 1.0;
  E(k + 1, 0) = 1.0;
  eb[k + 1] = -center[0];
  E(k + 2, 0) = -1.0;
  eb[k + 2] = center[0];
  ReluNetwork n = affine_net(E, eb);

  for (int j = 0; j < k; ++j) {
    n = compose(n, relu_identity(k + 3, 2));
    // (x, m, pos, neg) -> (x, m, t_pre = pos + neg - m).
    MatrixXd A = MatrixXd::Zero(k + 2, k + 3);
    for (int i = 0; i <= k; ++i) A(i, i) = 1.0;
    A(k + 1, k) = -1.0;
    A(k + 1, k + 1) = 1.0;
    A(k + 1, k + 2) = 1.0;
    n = compose(n, affine_net(A, VectorXd::Zero(k + 2)));
    n = compose(n, relu_identity(k + 2, 2));
    // (x, m, t) -> (x, m + t, pos', neg') or (x, m_k).
    const int out_dim = (j + 1 < k) ? k + 3 : k + 1;
    MatrixXd T = MatrixXd::Zero(out_dim, k + 2);
    VectorXd tb = VectorXd::Zero(out_dim);
    for (int i = 0; i < k; ++i) T(i, i) = 1.0;
    T(k, k) = 1.0;
    T(k, k + 1) = 1.0;
    if (j + 1 < k) {
      T(k + 1, j + 1) = 1.0;
      tb[k + 1] = -center[j + 1];
      T(k + 2, j + 1) = -1.0;
      tb[k + 2] = center[j + 1];
    }
    n = compose(n, affine_net(T, tb));
  }
  n = compose(n, relu_identity(k + 1, 2));  // materialize m_k
  MatrixXd H1 = MatrixXd::Identity(k + 1, k + 1);
  VectorXd h1 = VectorXd::Zero(k + 1);
  h1[k] = -r;
  n = compose(n, affine_net(H1, h1));
  n = compose(n, relu_identity(k + 1, 2));
  MatrixXd H2 = MatrixXd::Identity(k + 1, k + 1);
  VectorXd h2 = VectorXd::Zero(k + 1);
  H2(k, k) = -y0 / w;
  h2[k] = y0;
  n = compose(n, affine_net(H2, h2));
  n = compose(n, relu_identity(k + 1, 2));
  MatrixXd O = MatrixXd::Zero(k + 1, k + 1);
  O(0, k) = 1.0;
  for (int i = 0; i < k; ++i) O(i + 1, i) = 1.0;
  n = compose(n, affine_net(O, VectorXd::Zero(k + 1)));
  return n;
}

}  // namespace

ReluNetwork ball_indicator_core(const VectorXd& shifted_center, double y0,
                                double r, double w, double p,
                                const ReluNetwork* power_gadget) {
  if (std::isinf(p))
    return indicator_core_inf(shifted_center, y0, r, w);
  if (power_gadget == nullptr)
    throw UsageError("ball_indicator_core: power gadget required for finite p");
  return indicator_core_finite_p(shifted_center, y0, r, w, p, *power_gadget);
}

ReluNetwork build_ball_indicator(const VectorXd& x0, double y0, double r,
                                 double w, double p) {
  if (!(y0 > 0.0)) throw UsageError("ball indicator: y0 must be positive");
  if (!(r > 0.0)) throw UsageError("ball indicator: r must be positive");
  if (!(w > 0.0)) throw UsageError("ball indicator: w must be positive");
  if (!(p >= 1.0)) throw UsageError("ball indicator: p must be >= 1 or inf");
  const int k = static_cast<int>(x0.size());
  const double dloc = w + 2.0 * r;

  // Shift so that the verified domain is nonnegative and every shifted center
  // coordinate is >= dloc + (r+1): a clipped coordinate then reads as
  // distance >= dloc from the center, which the penalty branch classifies as
  // outside, matching the true geometry.
  const VectorXd shift =
      VectorXd::Constant(k, dloc + r + 1.0) - x0;
  const VectorXd c = x0 + shift;

  ReluNetwork entry = relu_identity(k, 2);
  entry.input_shift = shift;

  ReluNetwork core;
  double eps_tilde = 0.0;
  int gadget_width = 0;
  if (std::isinf(p)) {
    core = ball_indicator_core(c, y0, r, w, p, nullptr);
  } else {
    eps_tilde = std::pow(w, p) / (4.0 * k * std::pow(dloc, p));
    ReluNetwork g = power_gadget_for_norm(p, eps_tilde);
    gadget_width = g.width() > 0 ? g.width() : 1;
    core = ball_indicator_core(c, y0, r, w, p, &g);
  }
  ReluNetwork n = compose(entry, core);
  n.meta["indicator"] = json{{"p", std::isinf(p) ? -1.0 : p},
                             {"y0", y0},
                             {"r", r},
                             {"w", w},
                             {"eps_tilde", eps_tilde},
                             {"gadget_width", gadget_width}};
  n.meta["width_formula"] =
      std::isinf(p) ? "k+3" : "k+2+W(gadget)";
  finalize_spec(n, "ball_indicator", eps_tilde, std::isinf(p) ? -1.0 : p);
  return n;
}

ReluNetwork build_step(int C) {
  if (C < 2) throw UsageError("build_step: C must be >= 2");
  ReluNetwork n;
  // psi_0 = [2t - (2C-1)/2]_+ with t carried alongside.
  n.layers.push_back(
      {mat({{2.0}, {1.0}}), vec({-(2.0 * C - 1.0) / 2.0, 0.0})});
  for (int l = 0; l <= C - 1; ++l) {
    if (l > 0) {
      // psi_{3l} = [2t - (2(C-l)-1)/2 - psi_{3l-1}]_+.
      n.layers.push_back({mat({{-1.0, 2.0}, {0.0, 1.0}}),
                          vec({-(2.0 * (C - l) - 1.0) / 2.0, 0.0})});
    }
    // psi_{3l+1} = [l+1 - psi_{3l}]_+, psi_{3l+2} = [l+1 - psi_{3l+1}]_+.
    n.layers.push_back(
        {mat({{-1.0, 0.0}, {0.0, 1.0}}), vec({l + 1.0, 0.0})});
    n.layers.push_back(
        {mat({{-1.0, 0.0}, {0.0, 1.0}}), vec({l + 1.0, 0.0})});
  }
  n.layers.push_back({mat({{1.0, 0.0}}), vec({0.0})});
  n.meta["plateaus"] = C;
  finalize_spec(n, "step", 0.0, static_cast<double>(C));
  return n;
}

ReluNetwork build_max_accumulator() {
  ReluNetwork n;
  // (m, z): t = [z - m]_+, mc = [m]_+; then [mc + t]_+.
  n.layers.push_back({mat({{-1.0, 1.0}, {1.0, 0.0}}), vec({0.0, 0.0})});
  n.layers.push_back({mat({{1.0, 1.0}}), vec({0.0})});
  n.layers.push_back({mat({{1.0}}), vec({0.0})});
  n.meta["contract"] = "max(m, z) exact for nonnegative inputs";
  finalize_spec(n, "max_accumulator", 0.0, 0.0);
  return n;
}

}  // namespace robustmem::gadgets
