// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "robustmem/rng.hpp"

namespace robustmem::data {

int LabeledDataset::num_classes() const {
  int c = 0;
  for (int l : labels) c = std::max(c, l);
  return c;
}

void LabeledDataset::validate() const {
  if (n() < 1 || dim() < 1) throw UsageError("dataset needs N >= 1, d >= 1");
  if (static_cast<int>(labels.size()) != n())
    throw UsageError("label count does not match point count");
  for (int l : labels)
    if (l < 1) throw UsageError("labels must be positive integers");
  if (!X.allFinite()) throw UsageError("dataset has non-finite coordinates");
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (labels[i] != labels[j] && (X.col(i) - X.col(j)).norm() == 0.0)
        throw UsageError("equal points with different labels");
}

void RobustnessSpec::validate() const {
  if (!(p > 0.0)) throw UsageError("p must be in (0, inf]");
  if (!(q >= 1.0)) throw UsageError("q must be in [1, inf]");
  if (!(sigma >= 0.0)) throw UsageError("sigma must be nonnegative");
}

double lp_norm(const Eigen::VectorXd& v, double p) {
  if (!(p > 0.0)) throw UsageError("lp_norm: p must be positive");
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.cwiseAbs().sum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    s += std::pow(std::fabs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

double separation(const LabeledDataset& ds, double q) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int i = 0; i < ds.n(); ++i)
    for (int j = i + 1; j < ds.n(); ++j)
      if (ds.labels[i] != ds.labels[j]) {
        any = true;
        best = std::min(best, lp_norm(ds.X.col(i) - ds.X.col(j), q));
      }
  if (!any)
    throw UsageError("separation undefined: dataset has a single class");
  return best;
}

namespace {
double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }
}  // namespace

double c_plus(double p, double q, int d) {
  const double e = inv(q) - inv(p);
  return std::pow(static_cast<double>(d), std::max(0.0, e));
}

double c_minus(double p, double q, int d) {
  const double e = inv(q) - inv(p);
  return std::pow(static_cast<double>(d), std::min(0.0, e));
}

double norm_constant(NormSign sign, double p, double q, int d) {
  return sign == NormSign::plus ? c_plus(p, q, d) : c_minus(p, q, d);
}

RadiusVerdict validate_radius(const RobustnessSpec& spec, double delta, int d) {
  spec.validate();
  if (!(delta > 0.0)) throw UsageError("validate_radius: delta must be positive");
  RadiusVerdict v;
  v.threshold = 1.0 / (2.0 * c_plus(spec.p, spec.q, d));
  v.ratio = spec.sigma / delta;
  v.feasible = v.ratio < v.threshold;
  return v;
}

LabeledDataset gen_random_separated(int N, int d, int C, double delta, double q,
                                    std::uint64_t seed) {
  if (N < C || C < 2) throw UsageError("gen_random_separated: need N >= C >= 2");
  if (d < 1 || !(delta > 0.0)) throw UsageError("gen_random_separated: bad d/delta");
  const double side = 2.0 * delta * std::pow(static_cast<double>(N), 1.0 / d);
  Rng rng(derive_seed(seed, "dataset.gen"));
  LabeledDataset ds;
  ds.X.resize(d, N);
  ds.labels.resize(N);
  const int retry_cap = 10000;
  for (int i = 0; i < N; ++i) {
    ds.labels[i] = 1 + (i % C);
    bool placed = false;
    for (int attempt = 0; attempt < retry_cap && !placed; ++attempt) {
      Eigen::VectorXd cand(d);
      for (int j = 0; j < d; ++j) cand[j] = rng.uniform(0.0, side);
      bool ok = true;
      for (int prev = 0; prev < i && ok; ++prev)
        if (ds.labels[prev] != ds.labels[i] &&
            lp_norm(cand - ds.X.col(prev), q) < delta)
          ok = false;
      if (ok) {
        ds.X.col(i) = cand;
        placed = true;
      }
    }
    if (!placed)
      throw GenerationError("gen_random_separated: packing failed after " +
                            std::to_string(retry_cap) + " retries");
  }
  ds.validate();
  return ds;
}

Eigen::MatrixXd ball_sample(const Eigen::VectorXd& center, double r, double p,
                            int n, std::uint64_t seed, BallMode mode) {
  if (!(r >= 0.0)) throw UsageError("ball_sample: r must be >= 0");
  if (n < 1) throw UsageError("ball_sample: n must be >= 1");
  const int d = static_cast<int>(center.size());
  Rng rng(derive_seed(seed, "ball.sample"));
  Eigen::MatrixXd S(d, n);
  for (int i = 0; i < n; ++i) {
    if (r == 0.0) {
      S.col(i) = center;
      continue;
    }
    if (mode == BallMode::boundary && i % 3 == 0) {
      // Exact axis extreme.
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      const int axis = static_cast<int>(rng.below(d));
      v[axis] = (rng.u01() < 0.5 ? -1.0 : 1.0) * r;
      S.col(i) = center + v;
      continue;
    }
    if (std::isinf(p)) {
      if (mode == BallMode::interior) {
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v[j] = rng.uniform(-r, r);
        S.col(i) = center + v;
      } else {
        // Sign corner: every coordinate at magnitude exactly r.
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v[j] = (rng.u01() < 0.5 ? -1.0 : 1.0) * r;
        S.col(i) = center + v;
      }
      continue;
    }
    Eigen::VectorXd g = rng.gaussian(d);
    double nrm = lp_norm(g, p);
    while (nrm < 1e-12) {
      g = rng.gaussian(d);
      nrm = lp_norm(g, p);
    }
    const double t =
        (mode == BallMode::boundary) ? r : r * std::pow(rng.u01(), 1.0 / d);
    S.col(i) = center + g * (t / nrm);
  }
  return S;
}

void save_csv(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open for writing: " + path);
  for (int j = 0; j < ds.dim(); ++j) out << "x" << (j + 1) << ",";
  out << "label\n";
  char buf[64];
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.X(j, i));
      out << buf << ",";
    }
    out << ds.labels[i] << "\n";
  }
  if (!out) throw UsageError("write failed: " + path);
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV: " + path);
  int d = 0;
  {
    std::stringstream hs(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(hs, tok, ',')) cols.push_back(tok);
    if (cols.size() < 2 || cols.back() != "label")
      throw ParseError("CSV header must be x1,...,xd,label");
    d = static_cast<int>(cols.size()) - 1;
  }
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string tok;
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) {
      if (!std::getline(ls, tok, ','))
        throw ParseError("short row at line " + std::to_string(lineno));
      char* end = nullptr;
      x[j] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str())
        throw ParseError("bad number at line " + std::to_string(lineno));
    }
    if (!std::getline(ls, tok, ','))
      throw ParseError("missing label at line " + std::to_string(lineno));
    labels.push_back(std::atoi(tok.c_str()));
    pts.push_back(std::move(x));
  }
  if (pts.empty()) throw ParseError("CSV has no data rows: " + path);
  LabeledDataset ds;
  ds.X.resize(d, static_cast<int>(pts.size()));
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) ds.X.col(i) = pts[i];
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

}  // namespace robustmem::data
