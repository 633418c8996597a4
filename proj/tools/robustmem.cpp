// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single entry point for building, projecting, attacking and verifying
// robust memorizers. Exit codes: 0 success, 1 verification failure, 2 usage
// error, 3 construction/search failure.

#include <CLI11.hpp>
#include <chrono>
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
#include "robustmem/parallel.hpp"
#include "robustmem/projector.hpp"
#include "robustmem/rng.hpp"
#include "robustmem/verifier.hpp"

namespace {

using namespace robustmem;
using net::json;

constexpr const char* kVersion = "0.1.0";

double parse_norm(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF")
    return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw UsageError("bad norm parameter: " + s);
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open for writing: " + path);
  out << text;
  if (!out) throw UsageError("write failed: " + path);
}

// Every run with an output artifact also emits <artifact>.manifest.json so a
// rerun can be checked for byte-identical outputs.
struct Manifest {
  std::string subcommand;
  json flags = json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void write() const {
    if (outputs.empty()) return;
    json j;
    j["subcommand"] = subcommand;
    j["flags"] = flags;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["tool_version"] = kVersion;
    j["duration_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start)
            .count();
    write_file(outputs.front() + ".manifest.json", j.dump(1) + "\n");
  }
};

std::vector<double> load_coeffs(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> c;
  double v;
  while (in >> v) c.push_back(v);
  if (c.empty()) throw UsageError("no coefficients in " + path);
  return c;
}

Eigen::VectorXd parse_vector(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = vals[i];
  return v;
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  json j = json::parse(read_file(path));
  const auto& M = j.contains("M") ? j["M"] : j;
  const int rows = static_cast<int>(M.size());
  const int cols = static_cast<int>(M.at(0).size());
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = M[r][c].get<double>();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  par::init_from_env();
  CLI::App app{"robustmem: explicit robust-memorizing ReLU networks"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--threads may follow the subcommand

  std::uint64_t seed = 1;
  int threads = 0;
  app.add_option("--seed", seed, "root seed; all randomness derives from it");
  app.add_option("--threads", threads,
                 "worker thread cap (also env ROBUSTMEM_THREADS)");

  std::function<int()> action;

  // ---- gadget ----
  auto* g = app.add_subcommand("gadget", "emit an elementary network");
  std::string g_name, g_out, g_coeffs, g_center = "0,0";
  double g_eps = 1e-2, g_r = 0.5, g_w = 0.25, g_y0 = 1.0;
  std::string g_p = "2";
  g->add_option("name", g_name,
                "square | mult | power-nat | power-frac | poly | ball | step | "
                "maxacc")
      ->required();
  g->add_option("--epsilon", g_eps, "target uniform error");
  g->add_option("--p", g_p, "power / norm parameter (step: plateau count C)");
  g->add_option("--coeffs", g_coeffs, "coefficient file for poly (c0..cD)");
  g->add_option("--center", g_center, "ball center, comma separated");
  g->add_option("--r", g_r, "ball radius");
  g->add_option("--w", g_w, "ball transition width");
  g->add_option("--y0", g_y0, "ball plateau value");
  g->add_option("-o,--out", g_out, "output network JSON")->required();
  g->callback([&] {
    action = [&]() -> int {
      Manifest m;
      m.subcommand = "gadget";
      m.seed = seed;
      m.flags = {{"name", g_name}, {"epsilon", g_eps}, {"p", g_p}};
      m.outputs = {g_out};
      net::ReluNetwork n;
      if (g_name == "square") {
        n = gadgets::build_square(g_eps);
      } else if (g_name == "mult") {
        n = gadgets::build_mult(g_eps);
      } else if (g_name == "power-nat") {
        n = gadgets::build_power_nat(g_eps, static_cast<int>(parse_norm(g_p)));
      } else if (g_name == "power-frac") {
        n = gadgets::build_power_frac(g_eps, parse_norm(g_p));
      } else if (g_name == "poly") {
        if (g_coeffs.empty()) throw UsageError("poly needs --coeffs FILE");
        n = gadgets::build_poly(g_eps, load_coeffs(g_coeffs));
      } else if (g_name == "ball") {
        n = gadgets::build_ball_indicator(parse_vector(g_center), g_y0, g_r,
                                          g_w, parse_norm(g_p));
      } else if (g_name == "step") {
        n = gadgets::build_step(static_cast<int>(parse_norm(g_p)));
      } else if (g_name == "maxacc") {
        n = gadgets::build_max_accumulator();
      } else {
        throw UsageError("unknown gadget: " + g_name);
      }
      write_file(g_out, net::serialize(n));
      write_file(g_out + ".gadget.json",
                 gadgets::gadget_spec_of(n).to_json().dump(1) + "\n");
      m.write();
      return 0;
    };
  });

  // ---- dataset ----
  auto* ds_cmd = app.add_subcommand("dataset", "generate or check datasets");
  auto* ds_gen = ds_cmd->add_subcommand("gen", "random separated dataset");
  int dg_n = 8, dg_d = 3, dg_c = 2;
  double dg_delta = 1.0;
  std::string dg_q = "2", dg_out;
  ds_gen->add_option("--n", dg_n, "points")->required();
  ds_gen->add_option("--d", dg_d, "dimension")->required();
  ds_gen->add_option("--c", dg_c, "classes");
  ds_gen->add_option("--delta", dg_delta, "separation")->required();
  ds_gen->add_option("--q", dg_q, "separation norm");
  ds_gen->add_option("-o,--out", dg_out, "output CSV")->required();
  ds_gen->callback([&] {
    action = [&]() -> int {
      Manifest m;
      m.subcommand = "dataset gen";
      m.seed = seed;
      m.flags = {{"n", dg_n}, {"d", dg_d}, {"c", dg_c}, {"delta", dg_delta},
                 {"q", dg_q}};
      m.outputs = {dg_out};
      auto ds = data::gen_random_separated(dg_n, dg_d, dg_c, dg_delta,
                                           parse_norm(dg_q), seed);
      data::save_csv(ds, dg_out);
      m.write();
      return 0;
    };
  });
  auto* ds_check = ds_cmd->add_subcommand("check", "report dataset facts");
  std::string dc_path, dc_q = "2";
  ds_check->add_option("csv", dc_path, "dataset CSV")->required();
  ds_check->add_option("--q", dc_q, "separation norm");
  ds_check->callback([&] {
    action = [&]() -> int {
      auto ds = data::load_csv(dc_path);
      json j;
      j["n"] = ds.n();
      j["d"] = ds.dim();
      j["classes"] = ds.num_classes();
      j["separation"] = data::separation(ds, parse_norm(dc_q));
      j["q"] = dc_q;
      std::cout << j.dump(1) << "\n";
      return 0;
    };
  });

  // ---- bounds ----
  auto* b = app.add_subcommand("bounds", "width/radius thresholds and regime");
  int b_n = 2, b_d = 2, b_k = 1;
  std::string b_p = "2", b_q = "2", b_out;
  double b_delta = 1.0, b_sigma = 0.0;
  b->add_option("--n", b_n)->required();
  b->add_option("--d", b_d)->required();
  b->add_option("--k", b_k)->required();
  b->add_option("--p", b_p)->required();
  b->add_option("--q", b_q)->required();
  b->add_option("--delta", b_delta)->required();
  b->add_option("--sigma", b_sigma)->required();
  b->add_option("-o,--out", b_out, "write the report here as well");
  b->callback([&] {
    action = [&]() -> int {
      Manifest m;
      m.subcommand = "bounds";
      m.seed = seed;
      m.flags = {{"n", b_n},     {"d", b_d},         {"k", b_k},
                 {"p", b_p},     {"q", b_q},         {"delta", b_delta},
                 {"sigma", b_sigma}};
      auto rep = memorizer::bounds_report(b_n, b_d, b_k, parse_norm(b_p),
                                          parse_norm(b_q), b_delta, b_sigma);
      const std::string text = rep.to_json().dump(1) + "\n";
      std::cout << text;
      if (!b_out.empty()) {
        m.outputs = {b_out};
        write_file(b_out, text);
        m.write();
      }
      return 0;
    };
  });

  // ---- build ----
  auto* bu = app.add_subcommand("build", "construct a robust memorizer");
  std::string bu_kind, bu_ds, bu_out, bu_p = "2", bu_q = "2";
  double bu_sigma = 0.0;
  int bu_k = 0, bu_draws = 500;
  bu->add_option("kind", bu_kind, "fullwidth | smallwidth")->required();
  bu->add_option("--dataset", bu_ds, "dataset CSV")->required();
  bu->add_option("--sigma", bu_sigma, "robustness radius")->required();
  bu->add_option("--p", bu_p, "robustness norm");
  bu->add_option("--q", bu_q, "separation norm");
  bu->add_option("--k", bu_k, "target width (smallwidth)");
  bu->add_option("--max-draws", bu_draws, "projection draw budget");
  bu->add_option("-o,--out", bu_out, "output network JSON")->required();
  bu->callback([&] {
    action = [&]() -> int {
      Manifest m;
      m.subcommand = "build " + bu_kind;
      m.seed = seed;
      m.flags = {{"sigma", bu_sigma}, {"p", bu_p}, {"q", bu_q},
                 {"k", bu_k},         {"max-draws", bu_draws}};
      m.inputs = {bu_ds};
      m.outputs = {bu_out};
      auto ds = data::load_csv(bu_ds);
      data::RobustnessSpec spec;
      spec.p = parse_norm(bu_p);
      spec.q = parse_norm(bu_q);
      spec.sigma = bu_sigma;
      net::ReluNetwork n;
      if (bu_kind == "fullwidth") {
        n = memorizer::build_fullwidth(ds, spec);
      } else if (bu_kind == "smallwidth") {
        if (bu_k <= 0) throw UsageError("smallwidth needs --k");
        memorizer::SmallWidthOptions opts;
        opts.max_draws = bu_draws;
        opts.seed = derive_seed(seed, "cli.smallwidth");
        n = memorizer::build_smallwidth(ds, spec, bu_k, opts);
      } else {
        throw UsageError("unknown build kind: " + bu_kind);
      }
      write_file(bu_out, net::serialize(n));
      m.write();
      return 0;
    };
  });

  // ---- project ----
  auto* pr = app.add_subcommand("project", "preserving projection search");
  auto* pf = pr->add_subcommand("find", "draw-and-certify search");
  std::string pf_ds, pf_out;
  double pf_sigma = 0.0;
  int pf_k = 1, pf_draws = 500;
  pf->add_option("--dataset", pf_ds)->required();
  pf->add_option("--sigma", pf_sigma)->required();
  pf->add_option("--k", pf_k)->required();
  pf->add_option("--max-draws", pf_draws);
  pf->add_option("-o,--out", pf_out, "certificate JSON")->required();
  pf->callback([&] {
    action = [&]() -> int {
      Manifest m;
      m.subcommand = "project find";
      m.seed = seed;
      m.flags = {{"sigma", pf_sigma}, {"k", pf_k}, {"max-draws", pf_draws}};
      m.inputs = {pf_ds};
      m.outputs = {pf_out};
      auto ds = data::load_csv(pf_ds);
      auto cert = projector::find_preserving_projection(
          ds, pf_sigma, pf_k, pf_draws, derive_seed(seed, "cli.project"));
      json j = cert.to_json();
      j["per_draw_success_rate"] = 1.0 / cert.draws_used;
      write_file(pf_out, j.dump(1) + "\n");
      m.write();
      return 0;
    };
  });

  // ---- hard ----
  auto* h = app.add_subcommand("hard", "lower-bound instances and witnesses");
  auto* hb = h->add_subcommand("build", "two-sphere-cover dataset");
  int hb_n = 60, hb_d = 3, hb_k = 1;
  double hb_delta = 1.0, hb_sigma = 0.45;
  std::string hb_out;
  hb->add_option("--n", hb_n)->required();
  hb->add_option("--d", hb_d)->required();
  hb->add_option("--k", hb_k)->required();
  hb->add_option("--delta", hb_delta)->required();
  hb->add_option("--sigma", hb_sigma)->required();
  hb->add_option("-o,--out", hb_out, "output prefix (.csv and .json)")
      ->required();
  hb->callback([&] {
    action = [&]() -> int {
      Manifest m;
      m.subcommand = "hard build";
      m.seed = seed;
      m.flags = {{"n", hb_n}, {"d", hb_d}, {"k", hb_k}, {"delta", hb_delta},
                 {"sigma", hb_sigma}};
      m.outputs = {hb_out + ".csv", hb_out + ".json"};
      auto inst = hardness::build_hard_instance(hb_n, hb_d, hb_k, hb_delta,
                                                hb_sigma,
                                                derive_seed(seed, "cli.hard"));
      data::save_csv(inst.dataset, hb_out + ".csv");
      write_file(hb_out + ".json", inst.to_json().dump(1) + "\n");
      m.write();
      return 0;
    };
  });
  auto* hw = h->add_subcommand("witness", "collision witness for a rank-k map");
  std::string hw_matrix, hw_inst, hw_out;
  double hw_tol = 1e-6;
  int hw_restarts = 50;
  hw->add_option("--matrix", hw_matrix, "JSON {\"M\": [[...]]}")->required();
  hw->add_option("--instance", hw_inst,
                 "instance from 'hard build' (prefix or inst.json)")
      ->required();
  hw->add_option("--tol", hw_tol);
  hw->add_option("--restarts", hw_restarts);
  hw->add_option("-o,--out", hw_out, "witness JSON");
  hw->callback([&] {
    action = [&]() -> int {
      auto M = load_matrix(hw_matrix);
      std::string prefix = hw_inst;
      if (prefix.size() > 5 && prefix.substr(prefix.size() - 5) == ".json")
        prefix = prefix.substr(0, prefix.size() - 5);
      auto ds = data::load_csv(prefix + ".csv");
      auto inst = hardness::hard_instance_from_json(
          json::parse(read_file(prefix + ".json")), ds);
      auto w = hardness::witness_nonpreservation(
          M, inst, hw_tol, hw_restarts, derive_seed(seed, "cli.witness"));
      const std::string text = w.to_json().dump(1) + "\n";
      std::cout << text;
      if (!hw_out.empty()) {
        Manifest m;
        m.subcommand = "hard witness";
        m.seed = seed;
        m.flags = {{"tol", hw_tol}, {"restarts", hw_restarts}};
        m.inputs = {hw_matrix, prefix + ".csv", prefix + ".json"};
        m.outputs = {hw_out};
        write_file(hw_out, text);
        m.write();
      }
      return 0;
    };
  });

  // ---- verify ----
  auto* v = app.add_subcommand("verify", "sampled robust-memorization check");
  std::string v_net, v_ds, v_p = "2", v_q = "2", v_out;
  double v_sigma = 0.0;
  int v_samples = 1000, v_boundary = 100;
  v->add_option("--net", v_net)->required();
  v->add_option("--dataset", v_ds)->required();
  v->add_option("--sigma", v_sigma)->required();
  v->add_option("--p", v_p);
  v->add_option("--q", v_q);
  v->add_option("--samples", v_samples, "interior samples per point");
  v->add_option("--boundary", v_boundary, "boundary samples per point");
  v->add_option("-o,--out", v_out, "report JSON");
  v->callback([&] {
    action = [&]() -> int {
      auto n = net::deserialize(read_file(v_net));
      auto ds = data::load_csv(v_ds);
      data::RobustnessSpec spec;
      spec.p = parse_norm(v_p);
      spec.q = parse_norm(v_q);
      spec.sigma = v_sigma;
      auto rep = verifier::verify_robust(n, ds, spec, v_samples, v_boundary,
                                         derive_seed(seed, "cli.verify"));
      const std::string text = rep.to_json().dump(1) + "\n";
      std::cout << text;
      if (!v_out.empty()) {
        Manifest m;
        m.subcommand = "verify";
        m.seed = seed;
        m.flags = {{"sigma", v_sigma}, {"p", v_p}, {"samples", v_samples},
                   {"boundary", v_boundary}};
        m.inputs = {v_net, v_ds};
        m.outputs = {v_out};
        write_file(v_out, text);
        m.write();
      }
      return rep.pass ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) par::set_thread_cap(threads);

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
