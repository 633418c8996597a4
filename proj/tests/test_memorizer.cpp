// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "robustmem/memorizer.hpp"
#include "robustmem/verifier.hpp"

using namespace robustmem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

data::LabeledDataset pair_dataset(int d) {
  data::LabeledDataset ds;
  ds.X = MatrixXd::Zero(d, 2);
  ds.X(0, 1) = 1.0;
  ds.labels = {1, 2};
  return ds;
}

bool robust_ok(const net::ReluNetwork& f, const data::LabeledDataset& ds,
               const data::RobustnessSpec& spec, int ni = 300, int nb = 50) {
  return verifier::verify_robust(f, ds, spec, ni, nb, 99).pass;
}
}  // namespace

TEST_CASE("bounds: a_{2,100} and the verbatim 2416") {
  auto r = memorizer::bounds_report(100, 100, 20, 2.0, 2.0, 1.0, 0.001);
  CHECK(std::fabs(r.a - 7.58e-3) <= 1e-5);
  CHECK(r.b == 2416.0);
  CHECK(r.a < r.b);
}

TEST_CASE("bounds: regime classification matches the admissible-range map") {
  // k >= d+6 and sigma/delta just under the cap: possible.
  auto r1 = memorizer::bounds_report(50, 4, 10, 2.0, 2.0, 1.0, 0.49);
  CHECK(r1.regime == memorizer::Regime::possible);
  // At the cap: invalid radius.
  auto r2 = memorizer::bounds_report(50, 4, 10, 2.0, 2.0, 1.0, 0.5);
  CHECK(r2.regime == memorizer::Regime::invalid_radius);
  // Small width, sigma over the impossibility threshold (N large enough that
  // 2416 N^{-2/k} dips below the cap).
  auto r3 = memorizer::bounds_report(70, 10, 1, 2.0, 2.0, 1.0, 0.499);
  CHECK(r3.sigma_bound_impossible < 0.499);
  CHECK(r3.regime == memorizer::Regime::impossible);
  // Small width, sigma under the small-width sufficiency bound.
  auto r4 = memorizer::bounds_report(4, 10, 9, 2.0, 2.0, 1.0, 1e-4);
  CHECK(r4.regime == memorizer::Regime::possible);
}

TEST_CASE("bounds: no possible/impossible overlap on a grid and a < b") {
  for (int N : {4, 32})
    for (int d : {6, 14})
      for (double p : {1.0, 2.0, 3.0, kInf})
        for (double q : {1.0, 2.0, kInf})
          for (int k = 1; k <= d + 8; ++k)
            for (double ratio : {1e-5, 1e-3, 0.05, 0.2, 0.45, 0.6}) {
              auto r = memorizer::bounds_report(N, d, k, p, q, 1.0, ratio);
              CHECK(r.a < r.b);
              const bool poss = r.regime == memorizer::Regime::possible;
              const bool imposs = r.regime == memorizer::Regime::impossible ||
                                  r.regime == memorizer::Regime::invalid_radius;
              CHECK_FALSE((poss && imposs));
              if (k >= d + 6 && ratio < r.radius_cap)
                CHECK(poss);  // the large-width region is exactly the admissible range
            }
}

TEST_CASE("bounds: width thresholds bracket the regime") {
  auto r = memorizer::bounds_report(100, 50, 20, 2.0, 2.0, 1.0, 0.001);
  CHECK(r.width_sufficient > 6.0);
  CHECK(r.width_necessary < r.width_sufficient);
  // sigma = 0 gives the universal constant 7.
  auto r0 = memorizer::bounds_report(100, 50, 20, 2.0, 2.0, 1.0, 0.0);
  CHECK(r0.width_sufficient == 7.0);
}

TEST_CASE("fullwidth: two-point l2 dataset, width 8, sampled balls correct") {
  auto ds = pair_dataset(2);
  data::RobustnessSpec spec;
  spec.p = 2.0;
  spec.q = 2.0;
  spec.sigma = 0.2;
  auto f = memorizer::build_fullwidth(ds, spec);
  CHECK(f.width() == 8);  // d + 6 with the width-3 square gadget
  CHECK(robust_ok(f, ds, spec, 1000, 100));
  auto acc = memorizer::width_depth_account(f);
  CHECK(acc.width_ok);
  CHECK(acc.depth_ok);
}

TEST_CASE("fullwidth: single class gives a constant network") {
  data::LabeledDataset ds;
  ds.X = MatrixXd::Random(3, 4);
  ds.labels = {2, 2, 2, 2};
  data::RobustnessSpec spec;
  spec.sigma = 0.5;
  auto f = memorizer::build_fullwidth(ds, spec);
  Eigen::VectorXd x = Eigen::VectorXd::Random(3);
  CHECK(net::eval(f, x) == 2.0);
  CHECK(net::eval(f, 100.0 * x) == 2.0);
  // N = 1 as well.
  data::LabeledDataset one;
  one.X = MatrixXd::Random(3, 1);
  one.labels = {3};
  auto f1 = memorizer::build_fullwidth(one, spec);
  CHECK(net::eval(f1, x) == 3.0);
}

TEST_CASE("fullwidth: p=inf with sigma near the cap, corners included") {
  const int d = 3;
  auto ds = data::gen_random_separated(6, d, 3, 1.0, 2.0, 3);
  const double delta = data::separation(ds, 2.0);
  data::RobustnessSpec spec;
  spec.p = kInf;
  spec.q = 2.0;
  spec.sigma = 0.9 * delta / (2.0 * std::sqrt(static_cast<double>(d)));
  auto f = memorizer::build_fullwidth(ds, spec);
  CHECK(f.width() == d + 4);
  CHECK(robust_ok(f, ds, spec, 400, 200));  // boundary mode emits corners
}

TEST_CASE("fullwidth: p=1 exact route and depth O(Nd)") {
  auto ds = data::gen_random_separated(5, 4, 2, 1.0, 2.0, 8);
  data::RobustnessSpec spec;
  spec.p = 1.0;
  spec.q = 2.0;
  spec.sigma = 0.3;
  auto f = memorizer::build_fullwidth(ds, spec);
  CHECK(f.width() == 4 + 4);
  CHECK(robust_ok(f, ds, spec));
  auto acc = memorizer::width_depth_account(f);
  CHECK(acc.depth_ok);
  const double C = f.meta["accounting"]["depth_constant"].get<double>();
  CHECK(f.depth() <= C * 5 * 4);
}

TEST_CASE("fullwidth: infeasible radius throws") {
  auto ds = pair_dataset(2);
  data::RobustnessSpec spec;
  spec.sigma = 0.5;  // = delta/2
  CHECK_THROWS_AS(memorizer::build_fullwidth(ds, spec), InfeasibleError);
}

TEST_CASE("fullwidth: monotone feasibility in sigma") {
  auto ds = data::gen_random_separated(4, 3, 2, 1.0, 2.0, 15);
  data::RobustnessSpec spec;
  spec.sigma = 0.3 * data::separation(ds, 2.0);
  auto f_hi = memorizer::build_fullwidth(ds, spec);
  data::RobustnessSpec lo = spec;
  lo.sigma = spec.sigma / 2.0;
  auto f_lo = memorizer::build_fullwidth(ds, lo);
  CHECK(robust_ok(f_hi, ds, spec));
  CHECK(robust_ok(f_lo, ds, lo));
  CHECK(f_lo.depth() <= f_hi.depth());
}

TEST_CASE("fullwidth: depth grows affinely in N") {
  // Fixed geometry, growing N: depth deltas per extra point are constant.
  data::RobustnessSpec spec;
  spec.sigma = 0.2;
  std::vector<int> depths;
  for (int N : {2, 4, 8}) {
    data::LabeledDataset ds;
    ds.X = MatrixXd::Zero(2, N);
    for (int i = 0; i < N; ++i) ds.X(0, i) = static_cast<double>(i);
    ds.labels.resize(N);
    for (int i = 0; i < N; ++i) ds.labels[i] = 1 + (i % 2);
    auto f = memorizer::build_fullwidth(ds, spec);
    depths.push_back(f.depth());
  }
  const int slope1 = (depths[1] - depths[0]) / 2;
  const int slope2 = (depths[2] - depths[1]) / 4;
  CHECK(slope1 == slope2);
}

TEST_CASE("fullwidth: fractional q route") {
  auto ds = data::gen_random_separated(3, 3, 2, 1.0, 2.5, 21);
  data::RobustnessSpec spec;
  spec.p = 2.0;
  spec.q = 2.5;
  spec.sigma = 0.02 * data::separation(ds, 2.5);
  auto f = memorizer::build_fullwidth(ds, spec);
  CHECK(robust_ok(f, ds, spec, 150, 30));
}

TEST_CASE("fullwidth: integer q=3 route") {
  auto ds = data::gen_random_separated(3, 3, 2, 1.0, 3.0, 22);
  data::RobustnessSpec spec;
  spec.p = 3.0;
  spec.q = 3.0;
  spec.sigma = 0.05 * data::separation(ds, 3.0);
  auto f = memorizer::build_fullwidth(ds, spec);
  CHECK(f.width() == 3 + 3 + 10);  // d + 3 + W(power_nat)
  CHECK(robust_ok(f, ds, spec, 150, 30));
}

TEST_CASE("fullwidth: quasi-norm p=0.5 routes through enclosing balls") {
  auto ds = data::gen_random_separated(4, 3, 2, 1.0, 2.0, 23);
  data::RobustnessSpec spec;
  spec.p = 0.5;
  spec.q = 2.0;
  spec.sigma = 0.2 * data::separation(ds, 2.0);
  auto f = memorizer::build_fullwidth(ds, spec);
  CHECK(robust_ok(f, ds, spec, 300, 60));
}

TEST_CASE("smallwidth: p=inf scales the projection radius by sqrt(d)") {
  const int d = 10, k = 9, N = 4;
  auto ds = data::gen_random_separated(N, d, 2, 1.0, 2.0, 66);
  const double delta = data::separation(ds, 2.0);
  auto bounds = memorizer::bounds_report(N, d, k, kInf, 2.0, delta, 0.0);
  data::RobustnessSpec spec;
  spec.p = kInf;
  spec.sigma = 0.9 * bounds.sigma_bound_small_width * delta;
  auto f = memorizer::build_smallwidth(ds, spec, k, {.max_draws = 500, .seed = 8});
  CHECK(f.width() == k);
  CHECK(robust_ok(f, ds, spec));
}

TEST_CASE("smallwidth: d=12, k=10 at 0.9x the small-width bound") {
  const int d = 12, k = 10, N = 4;
  auto ds = data::gen_random_separated(N, d, 2, 1.0, 2.0, 33);
  const double delta = data::separation(ds, 2.0);
  auto bounds = memorizer::bounds_report(N, d, k, 2.0, 2.0, delta, 0.0);
  data::RobustnessSpec spec;
  spec.sigma = 0.9 * bounds.sigma_bound_small_width * delta;
  memorizer::SmallWidthOptions opts;
  opts.max_draws = 500;
  opts.seed = 5;
  auto f = memorizer::build_smallwidth(ds, spec, k, opts);
  CHECK(f.width() == k);
  CHECK_FALSE(f.meta["outside_guarantee"].get<bool>());
  CHECK(robust_ok(f, ds, spec, 500, 100));
  auto acc = memorizer::width_depth_account(f);
  CHECK(acc.width_ok);
  CHECK(acc.depth_ok);
}

TEST_CASE("smallwidth: sigma=0 with the universal width 7") {
  auto ds = data::gen_random_separated(5, 9, 3, 1.0, 2.0, 44);
  data::RobustnessSpec spec;
  spec.sigma = 0.0;
  auto f = memorizer::build_smallwidth(ds, spec, 7, {.max_draws = 500, .seed = 7});
  CHECK(f.width() == 7);
  CHECK(robust_ok(f, ds, spec, 1, 0));  // exact fit on the points
}

TEST_CASE("smallwidth: k=6 is out of range") {
  auto ds = pair_dataset(8);
  data::RobustnessSpec spec;
  CHECK_THROWS_AS(memorizer::build_smallwidth(ds, spec, 6), UsageError);
}

TEST_CASE("smallwidth: projected separation satisfies sigma' < tau/2") {
  const int d = 10, k = 9, N = 4;
  auto ds = data::gen_random_separated(N, d, 2, 1.0, 2.0, 55);
  const double delta = data::separation(ds, 2.0);
  auto bounds = memorizer::bounds_report(N, d, k, 2.0, 2.0, delta, 0.0);
  data::RobustnessSpec spec;
  spec.sigma = 0.5 * bounds.sigma_bound_small_width * delta;
  auto f = memorizer::build_smallwidth(ds, spec, k, {.max_draws = 500, .seed = 2});
  const double tau = f.meta["projected_separation"].get<double>();
  const double sigma_inner = f.meta["inner"]["sigma"].get<double>();
  CHECK(sigma_inner < tau / 2.0);
  CHECK(robust_ok(f, ds, spec));
}

TEST_CASE("width_depth_account: rejects nets without accounting meta") {
  auto g = net::relu_identity(2, 3);
  CHECK_THROWS_AS(memorizer::width_depth_account(g), UsageError);
}
