// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/verifier.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "robustmem/parallel.hpp"
#include "robustmem/rng.hpp"

namespace robustmem::verifier {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using net::json;

json RobustnessReport::to_json() const {
  json pts = json::array();
  for (const auto& p : per_point)
    pts.push_back(json{{"index", p.index},
                       {"n_samples", p.n_samples},
                       {"n_fail", p.n_fail},
                       {"worst_dev", p.worst_dev}});
  return json{{"per_point", std::move(pts)},
              {"worst_dev", worst_dev},
              {"n_interior", n_interior},
              {"n_boundary", n_boundary},
              {"seed", seed},
              {"evidence", "sampled"},
              {"pass", pass}};
}

RobustnessReport verify_robust(const ReluNetwork& net, const LabeledDataset& ds,
                               const RobustnessSpec& spec, int n_interior,
                               int n_boundary, std::uint64_t seed,
                               const std::vector<InjectedPoint>& injected) {
  ds.validate();
  spec.validate();
  if (net.input_dim() != ds.dim())
    throw ShapeError("verify_robust: network input dim != dataset dim");
  if (n_interior < 0 || n_boundary < 0 || n_interior + n_boundary < 1)
    throw UsageError("verify_robust: need at least one sample per point");

  RobustnessReport rep;
  rep.n_interior = n_interior;
  rep.n_boundary = n_boundary;
  rep.seed = seed;
  rep.per_point.resize(ds.n());

  par::for_index(ds.n(), [&](std::int64_t i) {
    std::vector<VectorXd> extra;
    for (const auto& inj : injected)
      if (inj.index == static_cast<int>(i)) extra.push_back(inj.x);
    const int total = n_interior + n_boundary + static_cast<int>(extra.size());
    MatrixXd S(ds.dim(), total);
    int at = 0;
    if (n_interior > 0) {
      S.middleCols(at, n_interior) = data::ball_sample(
          ds.X.col(i), spec.sigma, spec.p, n_interior,
          derive_seed(seed, "verify.interior", static_cast<std::uint64_t>(i)),
          data::BallMode::interior);
      at += n_interior;
    }
    if (n_boundary > 0) {
      S.middleCols(at, n_boundary) = data::ball_sample(
          ds.X.col(i), spec.sigma, spec.p, n_boundary,
          derive_seed(seed, "verify.boundary", static_cast<std::uint64_t>(i)),
          data::BallMode::boundary);
      at += n_boundary;
    }
    for (const auto& x : extra) S.col(at++) = x;

    const Eigen::MatrixXd out = net::eval_batch(net, S);
    PointResult pr;
    pr.index = static_cast<int>(i);
    pr.n_samples = total;
    const double target = ds.labels[i];
    for (int s = 0; s < total; ++s) {
      const double dev = std::fabs(out(0, s) - target);
      pr.worst_dev = std::max(pr.worst_dev, dev);
      if (dev > 1e-9) ++pr.n_fail;
    }
    rep.per_point[i] = pr;
  });
  for (const auto& pr : rep.per_point)
    rep.worst_dev = std::max(rep.worst_dev, pr.worst_dev);
  rep.pass = rep.worst_dev <= 1e-9;
  return rep;
}

json ObstructionReport::to_json() const {
  json j;
  j["attempted"] = attempted;
  j["found"] = found;
  if (found) {
    j["inner_index"] = inner_index;
    j["outer_index"] = outer_index;
    j["residual"] = residual;
    j["out_inner"] = out_inner;
    j["out_outer"] = out_outer;
    j["outputs_equal"] = outputs_equal;
  }
  return j;
}

ObstructionReport verify_first_layer_obstruction(const ReluNetwork& net,
                                                 const LabeledDataset& ds,
                                                 const RobustnessSpec& spec,
                                                 int n_restarts,
                                                 std::uint64_t seed) {
  ds.validate();
  spec.validate();
  if (net.depth() < 1) throw UsageError("network has no layers");
  if (net.input_dim() != ds.dim())
    throw ShapeError("obstruction: network input dim != dataset dim");
  const MatrixXd& W1 = net.layers.front().W;
  const int d = ds.dim();

  ObstructionReport rep;
  // Numerical rank of the first layer; rank d leaves no kernel, so the
  // obstruction argument is out of scope.
  {
    Eigen::JacobiSVD<MatrixXd> svd(W1);
    const auto& S = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < S.size(); ++i)
      if (S[i] > std::max(1e-9, (S.size() ? 1e-12 * S[0] : 0.0))) ++rank;
    if (rank >= d) {
      rep.attempted = false;
      return rep;
    }
  }
  rep.attempted = true;

  // Ordered cross-class pairs: the sigma-ball moves around the first point of
  // the pair, the second is taken exactly.
  std::vector<VectorXd> inner, outer;
  std::vector<int> inner_ids, outer_ids;
  for (int i = 0; i < ds.n(); ++i)
    for (int j = 0; j < ds.n(); ++j)
      if (ds.labels[i] != ds.labels[j]) {
        if (std::find(inner_ids.begin(), inner_ids.end(), i) == inner_ids.end()) {
          inner_ids.push_back(i);
          inner.push_back(ds.X.col(i));
        }
        if (std::find(outer_ids.begin(), outer_ids.end(), j) == outer_ids.end()) {
          outer_ids.push_back(j);
          outer.push_back(ds.X.col(j));
        }
      }
  const double sigma2 = data::c_minus(spec.p, 2.0, d) * spec.sigma;
  // Hard instances live in the first k+1 coordinates, where k+1 = 1 + the
  // kernel codimension available; use the net width as the span hint when the
  // data is embedded, else disable guided seeding.
  int span_dims = 0;
  {
    int last_nonzero = 0;
    for (int j = 0; j < d; ++j)
      if (ds.X.row(j).cwiseAbs().maxCoeff() > 0.0) last_nonzero = j + 1;
    if (last_nonzero < d) span_dims = last_nonzero;
  }
  hardness::Witness w = hardness::witness_search(W1, inner, outer, sigma2, 1e-6,
                                                 n_restarts, seed, span_dims);
  if (!w.found) return rep;
  rep.found = true;
  rep.inner_index = inner_ids[w.i];
  rep.outer_index = outer_ids[w.j];
  rep.a_inner = w.a;
  rep.a_outer = ds.X.col(rep.outer_index);
  rep.residual = w.residual;
  rep.out_inner = net::eval(net, rep.a_inner);
  rep.out_outer = net::eval(net, rep.a_outer);
  rep.outputs_equal = std::fabs(rep.out_inner - rep.out_outer) <= 1e-9;
  return rep;
}

}  // namespace robustmem::verifier
