// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/hardness.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "robustmem/parallel.hpp"
#include "robustmem/rng.hpp"

namespace robustmem::hardness {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using net::json;

namespace {

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

VectorXd vec_from_json(const json& a) {
  VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

}  // namespace

json CoverReport::to_json() const {
  return json{{"max_gap", max_gap},
              {"n_samples", n_samples},
              {"target_radius", target_radius},
              {"covered", covered()}};
}

json HardInstance::to_json() const {
  json j;
  j["r"] = r;
  j["k"] = k;
  j["sigma"] = sigma;
  j["delta"] = delta;
  j["inner_cover_radius"] = inner_cover_radius;
  j["outer_cover_radius"] = outer_cover_radius;
  j["meets_hypothesis"] = meets_hypothesis;
  json in = json::array(), out = json::array();
  for (const auto& c : inner_centers) in.push_back(vec_to_json(c));
  for (const auto& c : outer_centers) out.push_back(vec_to_json(c));
  j["inner_centers"] = std::move(in);
  j["outer_centers"] = std::move(out);
  return j;
}

HardInstance hard_instance_from_json(const json& j, const LabeledDataset& ds) {
  HardInstance h;
  h.dataset = ds;
  h.r = j.at("r").get<double>();
  h.k = j.at("k").get<int>();
  h.sigma = j.at("sigma").get<double>();
  h.delta = j.at("delta").get<double>();
  h.inner_cover_radius = j.value("inner_cover_radius", h.sigma);
  h.outer_cover_radius = j.value("outer_cover_radius", h.r);
  h.meets_hypothesis = j.value("meets_hypothesis", false);
  for (const auto& c : j.at("inner_centers")) h.inner_centers.push_back(vec_from_json(c));
  for (const auto& c : j.at("outer_centers")) h.outer_centers.push_back(vec_from_json(c));
  return h;
}

json Witness::to_json() const {
  json out;
  out["found"] = found;
  out["outer_index"] = j;
  out["inner_index"] = i;
  out["residual"] = residual;
  if (a.size() > 0) out["a"] = vec_to_json(a);
  return out;
}

double delta_k(int k) {
  if (k < 1) throw UsageError("delta_k: k >= 1");
  const double inner = 5.0 * k * std::log(k + 1.0) *
                       std::sqrt(2.0 * M_PI * (k + 1.0));
  return std::sqrt(2.0) * std::pow(inner, 1.0 / k);
}

namespace {

// Quasi-uniform candidate pool on the k-sphere of radius R.
std::vector<VectorXd> sphere_pool(int k, double R, int n, Rng& rng) {
  std::vector<VectorXd> pool;
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.push_back(R * rng.on_sphere(k + 1));
  return pool;
}

}  // namespace

std::vector<VectorXd> greedy_sphere_cover(int k, double R, double rho,
                                          int max_centers, std::uint64_t seed,
                                          int target_centers) {
  if (k < 0) throw UsageError("greedy_sphere_cover: k >= 0");
  if (!(rho >= 0.0) || !(R > 0.0) || max_centers < 1)
    throw UsageError("greedy_sphere_cover: bad parameters");
  if (target_centers > max_centers)
    throw UsageError("greedy_sphere_cover: target exceeds max_centers");

  if (k == 0) {
    // The 0-sphere is the pair {-R, R} on the first axis.
    std::vector<VectorXd> cs;
    VectorXd a(1), b(1);
    a << R;
    b << -R;
    cs.push_back(a);
    if (max_centers >= 2 && (target_centers == 0 ? true : target_centers >= 2))
      cs.push_back(b);
    while (static_cast<int>(cs.size()) < target_centers) cs.push_back(a);
    const double gap = cs.size() >= 2 ? 0.0 : 2.0 * R;
    if (gap > rho && cs.size() < 2)
      throw CoverError("greedy_sphere_cover: 0-sphere needs 2 centers", gap);
    return cs;
  }

  Rng rng(derive_seed(seed, "cover.greedy"));
  // Pool mesh must be well below rho so that pool coverage implies continuous
  // coverage; the FPS stop threshold keeps 10% slack for the mesh.
  double per_dim = std::max(4.0, 20.0 * R / std::max(rho, 1e-9));
  double want = 4.0 * std::pow(per_dim, k);
  const int n_pool = static_cast<int>(std::min(500000.0, std::max(20000.0, want)));
  std::vector<VectorXd> pool = sphere_pool(k, R, n_pool, rng);

  std::vector<double> dist(n_pool, std::numeric_limits<double>::infinity());
  std::vector<VectorXd> centers;
  centers.push_back(pool[0]);
  const double stop = 0.9 * rho;
  double max_gap = std::numeric_limits<double>::infinity();
  for (;;) {
    const VectorXd& latest = centers.back();
    int far_idx = 0;
    double far = -1.0;
    for (int i = 0; i < n_pool; ++i) {
      dist[i] = std::min(dist[i], (pool[i] - latest).norm());
      if (dist[i] > far) {
        far = dist[i];
        far_idx = i;
      }
    }
    max_gap = far;
    const bool covered = max_gap <= stop;
    const bool reached_target =
        target_centers == 0 || static_cast<int>(centers.size()) >= target_centers;
    if (covered && reached_target) break;
    if (static_cast<int>(centers.size()) >= max_centers) {
      if (!covered)
        throw CoverError("greedy_sphere_cover: budget exhausted", max_gap);
      break;
    }
    centers.push_back(pool[far_idx]);
  }
  return centers;
}

CoverReport verify_cover(const std::vector<VectorXd>& centers, double R,
                         double rho, int n_samples, std::uint64_t seed) {
  if (centers.empty()) throw UsageError("verify_cover: no centers");
  const int kp1 = static_cast<int>(centers[0].size());
  std::vector<double> gaps(n_samples);
  par::for_index(n_samples, [&](std::int64_t i) {
    Rng rng(derive_seed(seed, "cover.verify", static_cast<std::uint64_t>(i)));
    const VectorXd s = R * rng.on_sphere(kp1);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, (s - c).norm());
    gaps[i] = best;
  });
  CoverReport rep;
  rep.n_samples = n_samples;
  rep.target_radius = rho;
  for (double g : gaps) rep.max_gap = std::max(rep.max_gap, g);
  return rep;
}

HardInstance build_hard_instance(int N, int d, int k, double delta,
                                 double sigma, std::uint64_t seed) {
  if (k < 1 || k > d - 1) throw UsageError("build_hard_instance: 1 <= k <= d-1");
  if (!(delta > 0.0) || !(sigma > 0.0))
    throw UsageError("build_hard_instance: delta, sigma > 0");
  if (N < 4) throw UsageError("build_hard_instance: N >= 4");
  HardInstance inst;
  inst.k = k;
  inst.sigma = sigma;
  inst.delta = delta;
  inst.r = std::sqrt(2.0 * sigma * delta);
  inst.inner_cover_radius = sigma;
  inst.outer_cover_radius = inst.r;
  inst.meets_hypothesis =
      2.0 * sigma / delta > 4832.0 * std::pow(static_cast<double>(N), -2.0 / k);

  const int n_inner = (N + 1) / 2;  // odd N: inner class gets the extra point
  const int n_outer = N - n_inner;

  std::vector<VectorXd> inner_low, outer_low;
  try {
    inner_low = greedy_sphere_cover(k, inst.r, sigma, n_inner,
                                    derive_seed(seed, "hard.inner"), n_inner);
    outer_low = greedy_sphere_cover(k, inst.r + delta, inst.r, n_outer,
                                    derive_seed(seed, "hard.outer"), n_outer);
  } catch (const CoverError& e) {
    throw CoverError(
        std::string("build_hard_instance: cover failed (too few centers for "
                    "this sigma/delta/N) - ") + e.what(),
        e.achieved_max_gap);
  }

  auto embed = [&](const VectorXd& low) {
    VectorXd v = VectorXd::Zero(d);
    v.head(k + 1) = low;
    return v;
  };
  inst.dataset.X.resize(d, N);
  inst.dataset.labels.resize(N);
  int at = 0;
  for (const auto& c : inner_low) {
    inst.inner_centers.push_back(embed(c));
    inst.dataset.X.col(at) = inst.inner_centers.back();
    inst.dataset.labels[at++] = 1;
  }
  for (const auto& c : outer_low) {
    inst.outer_centers.push_back(embed(c));
    inst.dataset.X.col(at) = inst.outer_centers.back();
    inst.dataset.labels[at++] = 2;
  }
  inst.dataset.validate();
  return inst;
}

namespace {

struct KernelInfo {
  MatrixXd basis;  // d x (d - rank), orthonormal columns
  int rank = 0;
};

KernelInfo kernel_of(const MatrixXd& M, int d) {
  MatrixXd Md = M;
  if (Md.cols() != d) throw UsageError("witness: matrix column count != d");
  Eigen::JacobiSVD<MatrixXd> svd(Md, Eigen::ComputeFullV);
  const auto& S = svd.singularValues();
  const double smax = S.size() > 0 ? S[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < S.size(); ++i)
    if (S[i] > std::max(1e-9, 1e-12 * smax)) ++rank;
  KernelInfo info;
  info.rank = rank;
  info.basis = svd.matrixV().rightCols(d - rank);
  return info;
}

struct Candidate {
  int i, j;
  VectorXd a0;
};

double pair_residual(const MatrixXd& M, const VectorXd& b, const VectorXd& a) {
  const VectorXd diff = b - a;
  const double nrm = diff.norm();
  if (nrm < 1e-12) return std::numeric_limits<double>::infinity();
  return (M * diff).norm() / nrm;
}

// Alternating projection between ker(M) and {b - a : a in B(x_i, sigma)}.
// Both sets are convex, so iterates converge; on pairs whose sets intersect
// the residual goes to zero.
VectorXd alternate(const MatrixXd& K, const VectorXd& b, const VectorXd& xi,
                   double sigma, VectorXd a, int iters) {
  for (int t = 0; t < iters; ++t) {
    VectorXd w = b - a;
    w = K * (K.transpose() * w);  // project onto kernel
    VectorXd ap = b - w;
    VectorXd delta = ap - xi;
    const double nrm = delta.norm();
    if (nrm > sigma && nrm > 0.0) delta *= sigma / nrm;
    a = xi + delta;
  }
  return a;
}

}  // namespace

Witness witness_search(const MatrixXd& M, const std::vector<VectorXd>& inner,
                       const std::vector<VectorXd>& outer, double sigma,
                       double tol, int n_restarts, std::uint64_t seed,
                       int span_dims) {
  if (inner.empty() || outer.empty())
    throw UsageError("witness_search: need inner and outer points");
  const int d = static_cast<int>(inner[0].size());
  const KernelInfo ker = kernel_of(M, d);
  Witness best;
  if (ker.rank >= d) return best;  // full rank, no kernel to exploit
  const MatrixXd& K = ker.basis;

  std::vector<Candidate> cands;
  // Construction-guided candidates. A direction x in ker(M) within the span of
  // the data coordinates pierces the outer sphere at u; walking the ray into a
  // nearby outer ball lands on a boundary point b_j - alpha with alpha in some
  // inner neighborhood, which is (up to cover slack) an exact collision. The
  // alternating projection converges from any seed of the right (i, j) pair,
  // so the seeds only need to identify those pairs.
  if (span_dims > 0) {
    std::vector<VectorXd> dirs;
    if (span_dims >= d) {
      for (Eigen::Index c = 0; c < K.cols(); ++c) dirs.push_back(K.col(c));
    } else {
      MatrixXd K_low = K.bottomRows(d - span_dims);
      Eigen::JacobiSVD<MatrixXd> svd(K_low, Eigen::ComputeFullV);
      const auto& S = svd.singularValues();
      for (Eigen::Index c = svd.matrixV().cols() - 1; c >= 0; --c) {
        const double sv = c < S.size() ? S[c] : 0.0;
        if (sv > 1e-9) break;
        dirs.push_back(K * svd.matrixV().col(c));
      }
    }
    const double outer_R = outer[0].norm();
    for (VectorXd dir : dirs) {
      if (dir.norm() < 1e-12) continue;
      dir.normalize();
      for (double sign : {1.0, -1.0}) {
        const VectorXd u = (sign * outer_R) * dir;
        // A few nearest outer balls to u.
        std::vector<std::pair<double, int>> by_dist;
        for (int j = 0; j < static_cast<int>(outer.size()); ++j)
          by_dist.emplace_back((u - outer[j]).norm(), j);
        std::sort(by_dist.begin(), by_dist.end());
        const int n_outer_try = std::min<int>(3, by_dist.size());
        for (int t = 0; t < n_outer_try; ++t) {
          const int j = by_dist[t].second;
          const VectorXd& b = outer[j];
          // Point of the segment 0 -> u closest to b (the segment's crossing
          // of the outer ball sits near here).
          const double s = std::clamp(u.dot(b) / u.squaredNorm(), 0.05, 1.0);
          const VectorXd v = s * u;
          const VectorXd alpha_target = b - v;
          std::vector<std::pair<double, int>> inner_by_dist;
          for (int i = 0; i < static_cast<int>(inner.size()); ++i)
            inner_by_dist.emplace_back((alpha_target - inner[i]).norm(), i);
          std::sort(inner_by_dist.begin(), inner_by_dist.end());
          const int n_inner_try = std::min<int>(2, inner_by_dist.size());
          for (int ti = 0; ti < n_inner_try; ++ti) {
            const int i = inner_by_dist[ti].second;
            VectorXd a0 = alpha_target;
            VectorXd delta = a0 - inner[i];
            if (delta.norm() > sigma && delta.norm() > 0.0)
              a0 = inner[i] + delta * (sigma / delta.norm());
            cands.push_back(Candidate{i, j, a0});
          }
        }
      }
    }
  }
  {
    Rng rng(derive_seed(seed, "witness.restarts"));
    for (int t = 0; t < n_restarts; ++t) {
      Candidate c;
      c.i = static_cast<int>(rng.below(inner.size()));
      c.j = static_cast<int>(rng.below(outer.size()));
      c.a0 = inner[c.i] + sigma * rng.u01() * rng.on_sphere(d);
      cands.push_back(std::move(c));
    }
  }

  std::vector<double> residuals(cands.size());
  std::vector<VectorXd> points(cands.size());
  par::for_index(static_cast<std::int64_t>(cands.size()), [&](std::int64_t t) {
    const Candidate& c = cands[t];
    VectorXd a = alternate(K, outer[c.j], inner[c.i], sigma, c.a0, 300);
    // Kernel snap: if the exact kernel projection stays inside the ball, the
    // residual is zero to machine precision.
    VectorXd w = outer[c.j] - a;
    VectorXd w_snap = K * (K.transpose() * w);
    VectorXd a_snap = outer[c.j] - w_snap;
    if ((a_snap - inner[c.i]).norm() <= sigma * (1.0 + 1e-9) + 1e-12) a = a_snap;
    residuals[t] = pair_residual(M, outer[c.j], a);
    points[t] = std::move(a);
  });
  for (std::size_t t = 0; t < cands.size(); ++t) {
    if (residuals[t] < best.residual) {
      best.residual = residuals[t];
      best.i = cands[t].i;
      best.j = cands[t].j;
      best.a = points[t];
    }
  }
  best.found = best.residual <= tol;
  return best;
}

Witness witness_nonpreservation(const MatrixXd& M, const HardInstance& inst,
                                double tol, int n_restarts,
                                std::uint64_t seed) {
  return witness_search(M, inst.inner_centers, inst.outer_centers, inst.sigma,
                        tol, n_restarts, seed, inst.k + 1);
}

}  // namespace robustmem::hardness
