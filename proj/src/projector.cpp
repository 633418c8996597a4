// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/projector.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>

#include "robustmem/parallel.hpp"
#include "robustmem/rng.hpp"

namespace robustmem::projector {

using net::json;

namespace {

std::string hex_of(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double num_of(const json& j) {
  if (j.is_number()) return j.get<double>();
  return std::strtod(j.get<std::string>().c_str(), nullptr);
}

}  // namespace

double ProjectionCertificate::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pm : margins) m = std::min(m, pm.margin);
  return m;
}

json ProjectionCertificate::to_json() const {
  json j;
  json P_hex = json::array(), P_dec = json::array();
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    json row = json::array(), rowd = json::array();
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
      row.push_back(hex_of(P(r, c)));
      rowd.push_back(P(r, c));
    }
    P_hex.push_back(std::move(row));
    P_dec.push_back(std::move(rowd));
  }
  j["P"] = std::move(P_hex);
  j["P_dec"] = std::move(P_dec);
  j["epsilon"] = epsilon;
  j["sigma"] = sigma;
  j["draws_used"] = draws_used;
  j["outside_guarantee"] = outside_guarantee;
  json ms = json::array();
  for (const auto& m : margins)
    ms.push_back(json{{"i", m.i}, {"j", m.j}, {"distance", m.distance},
                      {"margin", m.margin}});
  j["margins"] = std::move(ms);
  return j;
}

ProjectionCertificate certificate_from_json(const json& j) {
  ProjectionCertificate c;
  const auto& P = j.at("P");
  const Eigen::Index rows = static_cast<Eigen::Index>(P.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(P.at(0).size());
  c.P.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index cc = 0; cc < cols; ++cc) c.P(r, cc) = num_of(P[r][cc]);
  c.epsilon = j.at("epsilon").get<double>();
  c.sigma = j.at("sigma").get<double>();
  c.draws_used = j.value("draws_used", 0);
  c.outside_guarantee = j.value("outside_guarantee", false);
  if (j.contains("margins"))
    for (const auto& m : j["margins"])
      c.margins.push_back(PairMargin{m.at("i").get<int>(), m.at("j").get<int>(),
                                     m.at("distance").get<double>(),
                                     m.at("margin").get<double>()});
  return c;
}

Eigen::MatrixXd sample_projection(int d, int k, std::uint64_t seed) {
  if (k < 1 || k > d) throw UsageError("sample_projection: need 1 <= k <= d");
  for (int attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, "projector.haar", attempt));
    Eigen::MatrixXd G(k, d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) G(i, j) = rng.normal();
    // Modified Gram-Schmidt over rows, with one re-orthogonalization pass.
    bool degenerate = false;
    for (int i = 0; i < k && !degenerate; ++i) {
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < i; ++j)
          G.row(i) -= G.row(i).dot(G.row(j)) * G.row(j);
      const double nrm = G.row(i).norm();
      if (nrm < 1e-10) degenerate = true;
      else G.row(i) /= nrm;
    }
    if (!degenerate) return G;
  }
}

double required_epsilon(int N, int d, int k) {
  if (N < 2 || k < 1 || k > d - 1)
    throw UsageError("required_epsilon: need N >= 2, 1 <= k <= d-1");
  return 0.5 * std::sqrt(static_cast<double>(k) / (d * M_E)) *
         std::pow(static_cast<double>(N), -2.0 / k);
}

CertifyResult certify(const Eigen::MatrixXd& P, const LabeledDataset& ds,
                      double sigma, double epsilon) {
  ds.validate();
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw UsageError("certify: epsilon must be in (0, 1/2]");
  if (!(sigma >= 0.0)) throw UsageError("certify: sigma must be >= 0");
  const double delta = data::separation(ds, 2.0);
  if (!(sigma < delta / 2.0))
    throw InfeasibleError("certify: sigma >= delta/2 is infeasible");
  CertifyResult res;
  std::vector<PairMargin> margins;
  bool ok = true;
  for (int i = 0; i < ds.n(); ++i)
    for (int j = i + 1; j < ds.n(); ++j) {
      if (ds.labels[i] == ds.labels[j]) continue;
      const Eigen::VectorXd diff = ds.X.col(i) - ds.X.col(j);
      const double dist = diff.norm();
      PairMargin pm;
      pm.i = i;
      pm.j = j;
      pm.distance = dist;
      pm.margin = (P * (diff / dist)).norm() - (epsilon + 2.0 * sigma / dist);
      margins.push_back(pm);
      if (!(pm.margin > 0.0)) ok = false;
    }
  if (ok) {
    ProjectionCertificate cert;
    cert.P = P;
    cert.epsilon = epsilon;
    cert.sigma = sigma;
    cert.margins = std::move(margins);
    cert.draws_used = 0;
    res.cert = std::move(cert);
  } else {
    for (const auto& m : margins)
      if (!(m.margin > 0.0)) res.violations.push_back(m);
  }
  return res;
}

SearchResult try_find_preserving_projection(const LabeledDataset& ds,
                                            double sigma, int k, int max_draws,
                                            std::uint64_t seed) {
  ds.validate();
  if (max_draws < 1) throw UsageError("max_draws must be >= 1");
  const int d = ds.dim();
  const double eps = required_epsilon(ds.n(), d, k);
  const double delta = data::separation(ds, 2.0);
  if (!(sigma < delta / 2.0))
    throw InfeasibleError("projection search: sigma >= delta/2 is infeasible");
  SearchResult out;
  out.outside_guarantee = !(2.0 * sigma / delta <= eps);

  const int batch = 64;
  for (int base = 0; base < max_draws; base += batch) {
    const int m = std::min(batch, max_draws - base);
    std::vector<char> ok(m, 0);
    std::vector<Eigen::MatrixXd> Ps(m);
    par::for_index(m, [&](std::int64_t t) {
      Ps[t] = sample_projection(d, k, derive_seed(seed, "projector.draw",
                                                  static_cast<std::uint64_t>(base + t)));
      ok[t] = certify(Ps[t], ds, sigma, eps).success() ? 1 : 0;
    });
    for (int t = 0; t < m; ++t) {
      if (ok[t]) {
        auto res = certify(Ps[t], ds, sigma, eps);
        res.cert->draws_used = base + t + 1;
        res.cert->outside_guarantee = out.outside_guarantee;
        out.cert = std::move(res.cert);
        out.draws_attempted = base + t + 1;
        return out;
      }
    }
    out.draws_attempted = base + m;
  }
  return out;
}

ProjectionCertificate find_preserving_projection(const LabeledDataset& ds,
                                                 double sigma, int k,
                                                 int max_draws,
                                                 std::uint64_t seed) {
  SearchResult r = try_find_preserving_projection(ds, sigma, k, max_draws, seed);
  if (!r.cert)
    throw SearchError("projection search exhausted " +
                      std::to_string(max_draws) + " draws without certifying");
  return *r.cert;
}

net::AffineLayer scale_to_preserving(const ProjectionCertificate& cert) {
  if (!(cert.epsilon > 0.0)) throw UsageError("invalid certificate epsilon");
  return net::AffineLayer{cert.P / cert.epsilon,
                          Eigen::VectorXd::Zero(cert.P.rows())};
}

double cap_min_bruteforce(const Eigen::MatrixXd& P, const Eigen::VectorXd& v_hat,
                          double phi, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw UsageError("cap_min_bruteforce: n_samples >= 1");
  if (!(phi >= 0.0 && phi < M_PI / 2.0))
    throw UsageError("cap_min_bruteforce: phi in [0, pi/2)");
  const int d = static_cast<int>(v_hat.size());
  std::vector<double> vals(n_samples);
  par::for_index(n_samples, [&](std::int64_t i) {
    Rng rng(derive_seed(seed, "cap.sample", static_cast<std::uint64_t>(i)));
    double theta;
    if (i == 0 || phi == 0.0) {
      theta = 0.0;
    } else if (i % 2 == 1) {
      theta = phi;  // rim, where the cap minimum typically sits
    } else {
      theta = phi * std::sqrt(rng.u01());
    }
    Eigen::VectorXd s;
    if (theta == 0.0) {
      s = v_hat;
    } else {
      Eigen::VectorXd g = rng.gaussian(d);
      g -= g.dot(v_hat) * v_hat;
      double nrm = g.norm();
      while (nrm < 1e-12) {
        g = rng.gaussian(d);
        g -= g.dot(v_hat) * v_hat;
        nrm = g.norm();
      }
      s = std::cos(theta) * v_hat + std::sin(theta) * (g / nrm);
    }
    vals[i] = (P * s).norm();
  });
  double best = vals[0];
  for (double v : vals) best = std::min(best, v);
  return best;
}

OrthogonalForm orthogonal_form(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
  const auto& S = svd.singularValues();
  if (S.size() == 0 || S[0] <= 0.0)
    throw UsageError("orthogonal_form: zero map");
  int k = 0;
  for (Eigen::Index i = 0; i < S.size(); ++i)
    if (S[i] > 1e-12 * S[0]) ++k;
  OrthogonalForm f;
  f.epsilon = 1.0 / S[0];
  f.P = svd.matrixV().leftCols(k).transpose();
  return f;
}

double jl_pairwise_max_deviation(const Eigen::MatrixXd& T,
                                 const LabeledDataset& ds) {
  double worst = 0.0;
  for (int i = 0; i < ds.n(); ++i)
    for (int j = i + 1; j < ds.n(); ++j) {
      const Eigen::VectorXd diff = ds.X.col(i) - ds.X.col(j);
      worst = std::max(worst, std::fabs((T * diff).norm() - diff.norm()));
    }
  return worst;
}

Eigen::MatrixXd jl_counterexample_map(int d, int k, double sigma) {
  if (k < 1 || k + 1 > d)
    throw UsageError("jl_counterexample_map: need 1 <= k <= d-1");
  if (!(sigma > 0.0)) throw UsageError("jl_counterexample_map: sigma > 0");
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, d);
  T(0, 0) = 1.0;
  T(0, 1) = -1.0 / sigma;
  for (int i = 1; i < k; ++i) T(i, i + 1) = 1.0;
  return T;
}

}  // namespace robustmem::projector
