// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0
//
// The acceptance suite: one test case per criterion, each printing a final
// [PASS]/[FAIL] line. Tolerances and thresholds are pinned in code.

#include <doctest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "robustmem/data.hpp"
#include "robustmem/gadgets.hpp"
#include "robustmem/hardness.hpp"
#include "robustmem/memorizer.hpp"
#include "robustmem/net.hpp"
#include "robustmem/projector.hpp"
#include "robustmem/rng.hpp"
#include "robustmem/verifier.hpp"

using namespace robustmem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

struct Criterion {
  int id;
  std::string title;
  bool ok = true;

  Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}
  void expect(bool cond, const std::string& what) {
    CHECK_MESSAGE(cond, "criterion " << id << ": " << what);
    ok = ok && cond;
  }
  ~Criterion() {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id,
                title.c_str());
    std::fflush(stdout);
  }
};

VectorXd v1(double x) {
  VectorXd v(1);
  v << x;
  return v;
}

double grid_error_1d(const net::ReluNetwork& g,
                     const std::function<double(double)>& truth, double lo,
                     double hi, int n) {
  MatrixXd X(1, n + 1);
  for (int i = 0; i <= n; ++i) X(0, i) = lo + (hi - lo) * i / n;
  const MatrixXd Y = net::eval_batch(g, X);
  double worst = 0.0;
  for (int i = 0; i <= n; ++i)
    worst = std::max(worst, std::fabs(Y(0, i) - truth(X(0, i))));
  return worst;
}

}  // namespace

TEST_CASE("criterion 1: gadget error suite") {
  Criterion c(1, "gadget uniform errors and square depth scaling");
  const std::vector<double> coeffs = {0.5, -1.0, 0.25, 2.0, -0.75,
                                      0.1, -2.0, 1.5,  -0.5, 1.0};
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    c.expect(grid_error_1d(gadgets::build_square(eps),
                           [](double a) { return a * a; }, 0.0, 1.0,
                           10000) <= eps,
             "square grid error at eps=" + std::to_string(eps));
    {
      auto h = gadgets::build_mult(eps);
      double worst = 0.0;
      MatrixXd X(2, 101 * 101);
      int at = 0;
      for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
          X(0, at) = i / 100.0;
          X(1, at) = j / 100.0;
          ++at;
        }
      const MatrixXd Y = net::eval_batch(h, X);
      for (int s = 0; s < X.cols(); ++s)
        worst = std::max(worst, std::fabs(Y(0, s) - X(0, s) * X(1, s)));
      c.expect(worst <= eps, "mult grid error at eps=" + std::to_string(eps));
    }
    for (int p : {2, 3, 4, 5})
      c.expect(grid_error_1d(gadgets::build_power_nat(eps, p),
                             [p](double a) { return std::pow(a, p); }, 0.0, 1.0,
                             10000) <= eps,
               "power_nat p=" + std::to_string(p));
    for (double p : {1.5, 2.5})
      c.expect(grid_error_1d(gadgets::build_power_frac(eps, p),
                             [p](double a) { return std::pow(a, p); }, 0.0, 1.0,
                             10000) <= eps,
               "power_frac p=" + std::to_string(p));
    c.expect(grid_error_1d(gadgets::build_poly(eps, coeffs),
                           [&](double a) {
                             double acc = 0.0;
                             for (int i = 9; i >= 0; --i)
                               acc = acc * a + coeffs[i];
                             return acc;
                           },
                           -1.0, 1.0, 10000) <= eps,
             "poly degree 9");
  }
  // Depth growth per decade of eps.
  const double c_sq =
      gadgets::build_square(1e-1).meta["depth_constants"]["C_sq"].get<double>();
  int prev = gadgets::build_square(1e-1).depth();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const int cur = gadgets::build_square(eps).depth();
    c.expect(cur - prev <= c_sq * std::log2(10.0) + 1.0,
             "square depth decade step");
    prev = cur;
  }
}

TEST_CASE("criterion 2: step function plateaus") {
  Criterion c(2, "psi exact on every plateau for C in {2,3,5,10}");
  for (int C : {2, 3, 5, 10}) {
    auto psi = gadgets::build_step(C);
    bool all = true;
    for (int m = 1; m <= C; ++m)
      for (int i = 0; i < 100; ++i) {
        const double t = m - 0.25 + 0.5 * i / 99.0;
        all = all && std::fabs(net::eval(psi, v1(t)) - m) <= 1e-9;
      }
    c.expect(all, "C=" + std::to_string(C));
  }
}

TEST_CASE("criterion 3: ball indicator trichotomy") {
  Criterion c(3, "indicator trichotomy for p in {1,2,inf,3,2.5}, d in {2,3,5}");
  const double y0 = 2.5, r = 0.5, w = 0.3;
  int combo = 0;
  for (double p : {1.0, 2.0, kInf, 3.0, 2.5})
    for (int d : {2, 3, 5}) {
      Rng rng(1000 + combo);
      const VectorXd x0 = rng.gaussian(d);
      auto f = gadgets::build_ball_indicator(x0, y0, r, w, p);
      bool inside_ok = true, outside_ok = true, bound_ok = true;
      auto inside =
          data::ball_sample(x0, r, p, 1000, 10 + combo, data::BallMode::interior);
      auto yi = net::eval_batch(f, inside);
      for (int s = 0; s < inside.cols(); ++s)
        inside_ok = inside_ok && std::fabs(yi(0, s) - y0) <= 1e-9;
      for (double radius : {r + w + 0.01, r + 2.0 * w, r + 5.0 * w}) {
        auto outside = data::ball_sample(x0, radius, p, 334, 20 + combo,
                                         data::BallMode::boundary);
        auto yo = net::eval_batch(f, outside);
        for (int s = 0; s < outside.cols(); ++s)
          outside_ok = outside_ok && std::fabs(yo(0, s)) <= 1e-9;
      }
      for (int t = 0; t < 1000; ++t) {
        VectorXd x = x0 + 3.0 * rng.gaussian(d);
        const double val = net::eval_vec(f, x)[0];
        bound_ok = bound_ok && val <= y0 + 1e-9 && val >= -1e-12;
      }
      const std::string tag =
          " p=" + std::to_string(p) + " d=" + std::to_string(d);
      c.expect(inside_ok, "inside-r exactness" + tag);
      c.expect(outside_ok, "outside-(r+w) zero" + tag);
      c.expect(bound_ok, "global bound" + tag);
      ++combo;
    }
}

TEST_CASE("criterion 4: full-width memorizer batch") {
  Criterion c(4, "20 random datasets, p in {1,2,inf}: verified, accounted");
  const auto t0 = std::chrono::steady_clock::now();
  for (int s = 0; s < 20; ++s) {
    const double p = (s % 3 == 0) ? 1.0 : (s % 3 == 1 ? 2.0 : kInf);
    const int d = 3 + (s * 7) % 8;        // 3..10
    const int N = 10 + (s * 97) % 41;     // 10..50
    const int C = 2 + s % 4;              // 2..5
    auto ds = data::gen_random_separated(N, d, C, 1.0, 2.0, 9000 + s);
    const double delta = data::separation(ds, 2.0);
    data::RobustnessSpec spec;
    spec.p = p;
    spec.q = 2.0;
    spec.sigma = 0.9 * delta / (2.0 * data::c_plus(p, 2.0, d));
    auto f = memorizer::build_fullwidth(ds, spec);
    auto rep = verifier::verify_robust(f, ds, spec, 1000, 100, 77 + s);
    auto acc = memorizer::width_depth_account(f);
    const std::string tag = " (set " + std::to_string(s) + ")";
    c.expect(rep.pass, "verify_robust" + tag);
    c.expect(acc.width_ok, "width equals meta formula" + tag);
    c.expect(acc.depth_ok, "depth within meta constant x formula" + tag);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("  (criterion 4 batch time: %.1f s)\n", secs);
  c.expect(secs <= 600.0, "runtime <= 10 min");
}

TEST_CASE("criterion 5: small-width memorizer") {
  Criterion c(5, "d=12,k=10,N=4 at 0.9x bound; sigma=0 at k=7");
  const int d = 12, k = 10, N = 4;
  auto ds = data::gen_random_separated(N, d, 2, 1.0, 2.0, 313);
  const double delta = data::separation(ds, 2.0);
  const double a =
      memorizer::bounds_report(N, d, k, 2.0, 2.0, delta, 0.0).a;
  data::RobustnessSpec spec;
  spec.sigma = 0.9 * a * std::pow(static_cast<double>(N), -2.0 / (k - 6)) * delta;
  memorizer::SmallWidthOptions opts;
  opts.max_draws = 500;
  opts.seed = 11;
  auto f = memorizer::build_smallwidth(ds, spec, k, opts);
  c.expect(f.width() == k, "W(f) = k exactly");
  c.expect(verifier::verify_robust(f, ds, spec, 1000, 100, 5).pass,
           "verify_robust passes");

  data::RobustnessSpec zero;
  zero.sigma = 0.0;
  auto ds7 = data::gen_random_separated(6, 9, 3, 1.0, 2.0, 314);
  auto f7 = memorizer::build_smallwidth(ds7, zero, 7, {.max_draws = 500, .seed = 3});
  c.expect(f7.width() == 7, "universal width 7 at sigma=0");
  c.expect(verifier::verify_robust(f7, ds7, zero, 1, 0, 6).pass,
           "non-robust memorization exact fit");
}

TEST_CASE("criterion 6: projection search success rate and soundness") {
  Criterion c(6, "d=20,k=8,N=6: 95% trials certified in 200 draws; cap oracle");
  const int d = 20, k = 8, N = 6;
  const double eps_req = projector::required_epsilon(N, d, k);
  int successes = 0;
  bool cap_sound = true;
  for (int t = 0; t < 50; ++t) {
    auto ds = data::gen_random_separated(N, d, 2, 1.0, 2.0, 5000 + t);
    const double delta = data::separation(ds, 2.0);
    const double sigma = 0.25 * delta * eps_req / 2.0;
    auto res = projector::try_find_preserving_projection(ds, sigma, k, 200,
                                                         6000 + t);
    if (!res.cert) continue;
    ++successes;
    for (const auto& m : res.cert->margins) {
      const VectorXd vhat = (ds.X.col(m.i) - ds.X.col(m.j)).normalized();
      const double phi = std::asin(2.0 * sigma / m.distance);
      const double cap_min = projector::cap_min_bruteforce(
          res.cert->P, vhat, phi, 10000, 7000 + t);
      cap_sound = cap_sound && cap_min >= res.cert->epsilon - 1e-6;
    }
  }
  std::printf("  (criterion 6: %d/50 trials certified)\n", successes);
  c.expect(successes >= 48, "success rate >= 95%");
  c.expect(cap_sound, "every certificate passes the brute-force cap oracle");
}

TEST_CASE("criterion 7: JL contrast") {
  Criterion c(7, "explicit JL map is pair-isometric yet never certifies");
  const int d = 4, k = 3;
  data::LabeledDataset ds;
  ds.X = MatrixXd::Zero(d, 2);
  ds.X(0, 1) = 1.0;
  ds.labels = {1, 2};
  for (double sigma : {0.1, 0.01}) {
    auto T = projector::jl_counterexample_map(d, k, sigma);
    c.expect(projector::jl_pairwise_max_deviation(T, ds) <= 1e-12,
             "pairwise JL isometry at sigma=" + std::to_string(sigma));
    auto f = projector::orthogonal_form(T);
    auto res = projector::certify(f.P, ds, sigma, f.epsilon);
    c.expect(!res.success(),
             "certify fails at sigma=" + std::to_string(sigma));
  }
}

TEST_CASE("criterion 8: hard instance pipeline") {
  Criterion c(8, "d=3,k=1,N=60 covers, witnesses, draw failures, obstruction");
  auto inst = hardness::build_hard_instance(60, 3, 1, 1.0, 0.45, 21);
  std::vector<VectorXd> inner_low, outer_low;
  for (const auto& p : inst.inner_centers) inner_low.push_back(p.head(2));
  for (const auto& p : inst.outer_centers) outer_low.push_back(p.head(2));
  c.expect(
      hardness::verify_cover(inner_low, inst.r, inst.sigma, 10000, 31).covered(),
      "inner cover verified");
  c.expect(hardness::verify_cover(outer_low, inst.r + inst.delta, inst.r, 10000,
                                  32)
               .covered(),
           "outer cover verified");
  c.expect(data::separation(inst.dataset, 2.0) >= inst.delta - 1e-9,
           "separation >= delta");

  MatrixXd first_map;
  int found = 0;
  for (int t = 0; t < 20; ++t) {
    MatrixXd M = projector::sample_projection(3, 1, 800 + t);
    if (t == 0) first_map = M;
    auto w = hardness::witness_nonpreservation(M, inst, 1e-6, 50, 900 + t);
    if (w.found && w.residual <= 1e-6) ++found;
  }
  c.expect(found == 20, "witness found for 20/20 Haar rank-1 maps");

  auto search = projector::try_find_preserving_projection(inst.dataset,
                                                          inst.sigma, 1, 500, 41);
  c.expect(!search.cert && search.draws_attempted == 500,
           "projection search fails all 500 draws");

  net::ReluNetwork f;
  f.layers.push_back({first_map, VectorXd::Zero(1)});
  f.layers.push_back({MatrixXd::Constant(1, 1, 1.5), VectorXd::Constant(1, 0.2)});
  data::RobustnessSpec spec;
  spec.p = 2.0;
  spec.sigma = inst.sigma;
  auto rep = verifier::verify_first_layer_obstruction(f, inst.dataset, spec, 50, 51);
  c.expect(rep.attempted && rep.found && rep.residual <= 1e-6,
           "width-1 network obstruction found");
  c.expect(rep.outputs_equal, "witness pair evaluates to equal outputs");
}

TEST_CASE("criterion 9: bounds calculator and regime map") {
  Criterion c(9, "a_{2,100}, verbatim 2416, Fig-1 style regime grid");
  auto r100 = memorizer::bounds_report(100, 100, 20, 2.0, 2.0, 1.0, 0.001);
  c.expect(std::fabs(r100.a - 7.58e-3) <= 1e-5, "a_{2,100} = 7.58e-3 +- 1e-5");
  for (double p : {2.0, 3.0, kInf})
    for (double q : {1.0, 2.0})
      for (int d : {7, 100}) {
        auto r = memorizer::bounds_report(10, d, 3, p, q, 1.0, 0.0);
        const double dd = d;
        const double scale =
            std::pow(dd, std::max(0.0, 0.5 - (std::isinf(q) ? 0.0 : 1.0 / q)) +
                             std::max(0.0, (std::isinf(p) ? 0.0 : 1.0 / p) - 0.5));
        c.expect(std::fabs(r.b / scale - 2416.0) <= 1e-9,
                 "b coefficient is verbatim 2416");
      }

  const int N = 100, d = 10;
  bool no_overlap = true, monotone = true, large_width_exact = true,
       a_lt_b = true;
  for (int k = 1; k <= 20; ++k) {
    memorizer::Regime prev = memorizer::Regime::possible;
    for (int si = 1; si <= 20; ++si) {
      const double ratio = 0.55 * si / 20.0;
      auto r = memorizer::bounds_report(N, d, k, 2.0, 2.0, 1.0, ratio);
      a_lt_b = a_lt_b && r.a < r.b;
      const bool poss = r.regime == memorizer::Regime::possible;
      const bool imposs = r.regime == memorizer::Regime::impossible ||
                          r.regime == memorizer::Regime::invalid_radius;
      no_overlap = no_overlap && !(poss && imposs);
      // Larger sigma can only move away from possible (Fig-1 shape).
      if (si > 1 && poss && prev != memorizer::Regime::possible)
        monotone = false;
      prev = r.regime;
      if (k >= d + 6)
        large_width_exact =
            large_width_exact && (poss == (ratio < r.radius_cap));
    }
  }
  c.expect(no_overlap, "no possible/impossible overlap on the 20x20 grid");
  c.expect(monotone, "possible region is downward-closed in sigma");
  c.expect(large_width_exact, "k >= d+6 region matches the radius cap");
  c.expect(a_lt_b, "a < b everywhere on the grid");
}

TEST_CASE("criterion 10: norm-constant sandwich") {
  Criterion c(10, "sandwich and tightness witnesses on the 5x5x3 grid");
  Rng rng(2024);
  bool sandwich = true, tight = true;
  for (double p : {0.5, 1.0, 2.0, 3.0, kInf})
    for (double q : {1.0, 1.5, 2.0, 3.0, kInf})
      for (int d : {2, 5, 17}) {
        const double cp = data::c_plus(p, q, d);
        const double cm = data::c_minus(p, q, d);
        for (int t = 0; t < 1000; ++t) {
          VectorXd v = rng.gaussian(d);
          const double np = data::lp_norm(v, p);
          const double nq = data::lp_norm(v, q);
          sandwich = sandwich && cm * np <= nq * (1.0 + 1e-12) + 1e-15 &&
                     nq <= cp * np * (1.0 + 1e-12) + 1e-15;
        }
        VectorXd e1 = VectorXd::Zero(d);
        e1[0] = 1.0;
        VectorXd u = VectorXd::Constant(
            d, std::pow(static_cast<double>(d),
                        -(std::isinf(p) ? 0.0 : 1.0 / p)));
        const bool q_less = (std::isinf(p) ? 0.0 : 1.0 / p) <
                            (std::isinf(q) ? 0.0 : 1.0 / q);
        const VectorXd& uw = q_less ? u : e1;
        const VectorXd& lw = q_less ? e1 : u;
        tight = tight &&
                std::fabs(data::lp_norm(uw, q) - cp * data::lp_norm(uw, p)) <=
                    1e-9 &&
                std::fabs(data::lp_norm(lw, q) - cm * data::lp_norm(lw, p)) <=
                    1e-9;
      }
  c.expect(sandwich, "c- ||v||_p <= ||v||_q <= c+ ||v||_p on 1000 vectors each");
  c.expect(tight, "tightness witnesses within 1e-9");
}

namespace {

int shellrun(const std::string& cmd) { return std::system(cmd.c_str()); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("criterion 11: CLI pipeline determinism") {
  Criterion c(11, "identical manifests produce byte-identical artifacts");
  std::string cli_path;
  if (const char* env = std::getenv("ROBUSTMEM_CLI")) {
    cli_path = env;
  } else {
    for (const char* cand : {"./build/tools/robustmem", "./tools/robustmem",
                             "../tools/robustmem"}) {
      if (std::ifstream(cand).good()) {
        cli_path = cand;
        break;
      }
    }
  }
  const char* cli = cli_path.empty() ? nullptr : cli_path.c_str();
  c.expect(cli != nullptr, "CLI binary located (ROBUSTMEM_CLI or build tree)");
  if (!cli) return;
  const std::string base = "/tmp/robustmem_acceptance11";
  shellrun("rm -rf " + base + " && mkdir -p " + base + "/a " + base + "/b");
  for (const std::string run : {"a", "b"}) {
    const std::string dir = base + "/" + run;
    const std::string quiet = " >/dev/null 2>&1";
    c.expect(shellrun(std::string(cli) + " dataset gen --n 12 --d 4 --c 3 "
                      "--delta 1 --seed 17 -o " + dir + "/ds.csv" + quiet) == 0,
             "dataset gen");
    c.expect(shellrun(std::string(cli) + " build fullwidth --dataset " + dir +
                      "/ds.csv --sigma 0.1 --p 2 --seed 17 -o " + dir +
                      "/full.json" + quiet) == 0,
             "build fullwidth");
    c.expect(shellrun(std::string(cli) + " build smallwidth --dataset " + dir +
                      "/ds.csv --sigma 0.002 --k 9 --seed 17 -o " + dir +
                      "/small.json" + quiet) == 0,
             "build smallwidth");
    c.expect(shellrun(std::string(cli) + " project find --dataset " + dir +
                      "/ds.csv --sigma 0.002 --k 3 --max-draws 300 --seed 17 "
                      "-o " + dir + "/cert.json" + quiet) == 0,
             "project find");
    c.expect(shellrun(std::string(cli) + " hard build --n 30 --d 3 --k 1 "
                      "--delta 1 --sigma 0.45 --seed 17 -o " + dir + "/inst" +
                      quiet) == 0,
             "hard build");
    c.expect(shellrun(std::string(cli) + " verify --net " + dir +
                      "/full.json --dataset " + dir + "/ds.csv --sigma 0.1 "
                      "--p 2 --samples 200 --boundary 20 --seed 17 -o " + dir +
                      "/report.json" + quiet) == 0,
             "verify");
  }
  for (const std::string f : {"ds.csv", "full.json", "small.json", "cert.json",
                              "inst.csv", "inst.json", "report.json"}) {
    const std::string a = slurp(base + "/a/" + f);
    const std::string b = slurp(base + "/b/" + f);
    c.expect(!a.empty() && a == b, "byte-identical " + f);
  }
}
