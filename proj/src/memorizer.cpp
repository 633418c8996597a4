// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/memorizer.hpp"

#include <cmath>
#include <limits>

#include "robustmem/gadgets.hpp"

namespace robustmem::memorizer {

using data::c_plus;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using net::affine_net;
using net::compose;
using net::json;
using net::relu_identity;
using net::stack;

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

// Working norm of the indicator chain: p itself when the norm net is exact,
// otherwise the separation norm (gap-free: the c^+_{p,rho} enclosing radius
// matches the admissible range exactly in both cases).
double working_norm(double p, double q) {
  if (p == 1.0 || std::isinf(p)) return p;
  return q;
}

double depth_target_formula(int N, int d, double rho, double tau, double w) {
  const double lambda = tau / w;
  if (rho == 1.0 || std::isinf(rho)) return static_cast<double>(N) * d;
  if (rho == 2.0)
    return N * d * std::max(1.0, std::log2(d * lambda));
  if (rho == std::floor(rho))
    return N * d * rho * std::max(1.0, std::log2(d * rho * std::pow(lambda, rho)));
  return N * std::pow(d, 1.0 + 1.0 / rho) * lambda * rho *
         std::max(1.0, std::log2(d * rho * std::pow(lambda, rho)) + rho);
}

double round_up_3sig(double v) {
  if (v <= 0.0) return 0.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)) - 2.0);
  return std::ceil(v / mag) * mag;
}

ReluNetwork constant_net(int d, double value) {
  ReluNetwork n = affine_net(MatrixXd::Zero(1, d),
                             VectorXd::Constant(1, value));
  n.meta["construction"] = "constant";
  n.meta["value"] = value;
  return n;
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::possible: return "possible";
    case Regime::impossible: return "impossible";
    case Regime::unknown: return "unknown";
    case Regime::invalid_radius: return "invalid-radius";
  }
  return "?";
}

json BoundsReport::to_json() const {
  auto num = [](double v) -> json {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  return json{{"a", a},
              {"b", b},
              {"radius_cap", radius_cap},
              {"width_sufficient", num(width_sufficient)},
              {"width_necessary", num(width_necessary)},
              {"sigma_bound_small_width", num(sigma_bound_small_width)},
              {"sigma_bound_improved", num(sigma_bound_improved)},
              {"sigma_bound_impossible", num(sigma_bound_impossible)},
              {"regime", regime_name(regime)}};
}

BoundsReport bounds_report(int N, int d, int k, double p, double q,
                           double delta, double sigma) {
  if (N < 2 || d < 1 || k < 1) throw UsageError("bounds_report: N>=2, d>=1, k>=1");
  if (!(p > 0.0) || !(q >= 1.0)) throw UsageError("bounds_report: bad p/q");
  if (!(delta > 0.0) || !(sigma >= 0.0))
    throw UsageError("bounds_report: bad delta/sigma");
  BoundsReport r;
  const double dd = d;
  r.a = (1.0 / (8.0 * std::sqrt(M_E))) *
        std::pow(dd, -0.5 + std::min(0.0, 0.5 - inv(q)) +
                         std::min(0.0, inv(p) - 0.5));
  r.b = 2416.0 * std::pow(dd, std::max(0.0, 0.5 - inv(q)) +
                                  std::max(0.0, inv(p) - 0.5));
  r.radius_cap = 1.0 / (2.0 * c_plus(p, q, d));
  const double ratio = sigma / delta;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();

  if (sigma == 0.0) {
    r.width_sufficient = 7.0;
    r.width_necessary = 0.0;
  } else {
    const double xa = (delta / sigma) * r.a;
    r.width_sufficient = xa > 1.0 ? 6.0 + 2.0 * std::log(N) / std::log(xa) : inf;
    const double xb = (delta / sigma) * r.b;
    r.width_necessary = xb > 1.0 ? 2.0 * std::log(N) / std::log(xb) : inf;
  }
  r.sigma_bound_small_width =
      (k >= 7 && k <= d + 5) ? r.a * std::pow(N, -2.0 / (k - 6)) : nan;
  r.sigma_bound_improved =
      (k >= 7 && k <= d + 5)
          ? r.a * std::sqrt(static_cast<double>(k - 6)) * std::pow(N, -2.0 / (k - 6))
          : nan;
  r.sigma_bound_impossible =
      (k >= 1 && k <= d - 1) ? r.b * std::pow(N, -2.0 / k) : nan;

  if (ratio >= r.radius_cap) {
    r.regime = Regime::invalid_radius;
  } else if (k <= d - 1 && ratio > r.sigma_bound_impossible) {
    r.regime = Regime::impossible;
  } else if (k >= d + 6) {
    r.regime = Regime::possible;
  } else if (k >= 7 && k <= d + 5 && ratio <= r.sigma_bound_small_width) {
    r.regime = Regime::possible;
  } else {
    r.regime = Regime::unknown;
  }
  return r;
}

ReluNetwork build_fullwidth(const LabeledDataset& ds, const RobustnessSpec& spec) {
  ds.validate();
  spec.validate();
  const int d = ds.dim();
  const int N = ds.n();

  bool single_class = true;
  for (int i = 1; i < N; ++i)
    if (ds.labels[i] != ds.labels[0]) single_class = false;
  if (single_class) {
    ReluNetwork n = constant_net(d, ds.labels[0]);
    n.meta["construction"] = "fullwidth-constant";
    return n;
  }

  const double rho = working_norm(spec.p, spec.q);
  const double tau = data::separation(ds, rho);
  const double r = c_plus(spec.p, rho, d) * spec.sigma;
  const double w = tau - 2.0 * r;
  if (!(w > 0.0))
    throw InfeasibleError(
        "build_fullwidth: enclosing balls overlap (2 c+_{p,rho} sigma >= "
        "measured rho-separation)");
  const double dloc = w + 2.0 * r;

  ReluNetwork gadget;
  double eps_tilde = 0.0;
  int gadget_width = 0;
  const bool inf_route = std::isinf(rho);
  if (!inf_route) {
    eps_tilde = std::pow(w, rho) / (4.0 * d * std::pow(dloc, rho));
    gadget = gadgets::power_gadget_for_norm(rho, eps_tilde);
    gadget_width = std::max(1, gadget.width());
  }

  // Shift so every carried coordinate stays nonnegative on the union of the
  // robustness balls and clipped coordinates read as "outside" (shifted
  // centers are at least dloc + r + 1 in every coordinate).
  VectorXd shift(d);
  for (int j = 0; j < d; ++j)
    shift[j] = (dloc + r + 1.0) - ds.X.row(j).minCoeff();

  ReluNetwork entry = relu_identity(d, 2);
  entry.input_shift = shift;
  // (x) -> (x, m = 0).
  MatrixXd E = MatrixXd::Zero(d + 1, d);
  E.topRows(d) = MatrixXd::Identity(d, d);
  ReluNetwork cur = compose(entry, affine_net(E, VectorXd::Zero(d + 1)));

  for (int i = 0; i < N; ++i) {
    const VectorXd c = ds.X.col(i) + shift;
    ReluNetwork ind = gadgets::ball_indicator_core(
        c, static_cast<double>(ds.labels[i]), r, w, rho,
        inf_route ? nullptr : &gadget);
    cur = compose(cur, stack(ind, relu_identity(1, ind.depth())));
    // (z, x, m) -> (x, m, t_pre = z - m), materialize t, then (x, m + t).
    MatrixXd A = MatrixXd::Zero(d + 2, d + 2);
    for (int j = 0; j < d; ++j) A(j, j + 1) = 1.0;
    A(d, d + 1) = 1.0;
    A(d + 1, 0) = 1.0;
    A(d + 1, d + 1) = -1.0;
    cur = compose(cur, affine_net(A, VectorXd::Zero(d + 2)));
    cur = compose(cur, relu_identity(d + 2, 2));
    MatrixXd B = MatrixXd::Zero(d + 1, d + 2);
    B.topLeftCorner(d, d) = MatrixXd::Identity(d, d);
    B(d, d) = 1.0;
    B(d, d + 1) = 1.0;
    cur = compose(cur, affine_net(B, VectorXd::Zero(d + 1)));
  }
  MatrixXd out = MatrixXd::Zero(1, d + 1);
  out(0, d) = 1.0;
  cur = compose(cur, affine_net(out, VectorXd::Zero(1)));

  const int width_formula =
      inf_route ? d + 4 : d + 3 + gadget_width;
  const double T = depth_target_formula(N, d, rho, tau, w);
  json meta;
  meta["construction"] = "fullwidth";
  meta["p"] = std::isinf(spec.p) ? json("inf") : json(spec.p);
  meta["q"] = std::isinf(spec.q) ? json("inf") : json(spec.q);
  meta["sigma"] = spec.sigma;
  meta["rho"] = std::isinf(rho) ? json("inf") : json(rho);
  meta["r"] = r;
  meta["w"] = w;
  meta["tau"] = tau;
  meta["eps_tilde"] = eps_tilde;
  meta["N"] = N;
  meta["d"] = d;
  if (!inf_route) meta["gadget"] = gadget.meta["gadget_spec"];
  meta["width_formula"] =
      inf_route ? "d+4 (exact max route)" : "d+3+W(power gadget)";
  meta["accounting"] = json{
      {"width_formula_value", width_formula},
      {"depth_target_value", T},
      {"depth_target_expression",
       inf_route || rho == 1.0 ? "N*d" : "N*d-scaled log formula"},
      {"depth_constant", round_up_3sig(cur.depth() / T)}};
  cur.meta = std::move(meta);
  return cur;
}

ReluNetwork build_smallwidth(const LabeledDataset& ds, const RobustnessSpec& spec,
                             int k, const SmallWidthOptions& opts) {
  ds.validate();
  spec.validate();
  const int d = ds.dim();
  const int N = ds.n();
  if (k < 7 || k > d + 5)
    throw UsageError("build_smallwidth: width must satisfy 7 <= k <= d+5");

  bool single_class = true;
  for (int i = 1; i < N; ++i)
    if (ds.labels[i] != ds.labels[0]) single_class = false;
  if (single_class) {
    // Constant value via one hidden layer so the net can be padded to width k.
    MatrixXd H = MatrixXd::Zero(1, d);
    ReluNetwork n = affine_net(H, VectorXd::Constant(1, 1.0));
    n.layers.push_back(
        {MatrixXd::Constant(1, 1, static_cast<double>(ds.labels[0])),
         VectorXd::Zero(1)});
    n.meta["construction"] = "smallwidth-constant";
    ReluNetwork padded = net::pad_width(n, k);
    padded.meta = n.meta;
    padded.meta["accounting"] =
        json{{"width_formula_value", k},
             {"depth_target_value", 2.0},
             {"depth_constant", 1.0}};
    return padded;
  }

  const double sigma2 = c_plus(spec.p, 2.0, d) * spec.sigma;
  const double delta2 = data::separation(ds, 2.0);
  if (!(sigma2 < delta2 / 2.0))
    throw InfeasibleError("build_smallwidth: c+_{p,2} sigma >= delta/2");
  const int k_in = k - 6;

  projector::ProjectionCertificate cert = projector::find_preserving_projection(
      ds, sigma2, k_in, opts.max_draws, opts.seed);
  const net::AffineLayer T = projector::scale_to_preserving(cert);

  LabeledDataset projected;
  projected.X = T.W * ds.X;
  projected.labels = ds.labels;
  projected.validate();

  RobustnessSpec inner_spec;
  inner_spec.p = 2.0;
  inner_spec.q = 2.0;
  inner_spec.sigma = sigma2 / cert.epsilon;
  ReluNetwork inner = build_fullwidth(projected, inner_spec);
  const json inner_meta = inner.meta;

  ReluNetwork f = compose(affine_net(T.W, T.b), inner);
  if (f.width() < k) f = net::pad_width(f, k);
  if (f.width() != k)
    throw ConstructionError("build_smallwidth: achieved width " +
                            std::to_string(f.width()) + " != k");

  const double target =
      static_cast<double>(N) * k * std::max(1.0, std::log2(static_cast<double>(k)));
  json meta;
  meta["construction"] = "smallwidth";
  meta["k"] = k;
  meta["sigma"] = spec.sigma;
  meta["sigma_l2"] = sigma2;
  meta["p"] = std::isinf(spec.p) ? json("inf") : json(spec.p);
  meta["projection"] = cert.to_json();
  meta["outside_guarantee"] = cert.outside_guarantee;
  meta["inner"] = inner_meta;
  meta["projected_separation"] = data::separation(projected, 2.0);
  meta["width_formula"] = "k";
  meta["accounting"] = json{{"width_formula_value", k},
                            {"depth_target_value", target},
                            {"depth_target_expression", "N*k*log2(k)"},
                            {"depth_constant", round_up_3sig(f.depth() / target)}};
  f.meta = std::move(meta);
  return f;
}

json AccountingRecord::to_json() const {
  return json{{"arch", arch},
              {"width", width},
              {"depth", depth},
              {"width_formula_value", width_formula_value},
              {"width_ok", width_ok},
              {"depth_bound", depth_bound},
              {"depth_ok", depth_ok}};
}

AccountingRecord width_depth_account(const ReluNetwork& net) {
  if (!net.meta.contains("accounting"))
    throw UsageError("width_depth_account: network lacks accounting meta");
  const auto& acc = net.meta["accounting"];
  AccountingRecord rec;
  rec.arch = net.architecture();
  rec.width = net.width();
  rec.depth = net.depth();
  rec.width_formula_value = acc.value("width_formula_value", 0);
  rec.width_ok = rec.width == rec.width_formula_value;
  rec.depth_bound = acc.value("depth_constant", 0.0) *
                    acc.value("depth_target_value", 0.0);
  rec.depth_ok = rec.depth <= rec.depth_bound + 1e-9;
  return rec;
}

}  // namespace robustmem::memorizer
