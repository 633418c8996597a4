// Copyright 2026 The robustmem Authors
// SPDX-License-Identifier: Apache-2.0

#include "robustmem/net.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace robustmem::net {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ShapeError(what);
}

Eigen::VectorXd shifted_input(const ReluNetwork& net, const Eigen::VectorXd& x) {
  if (net.input_shift.size() == 0) return x;
  return x + net.input_shift;
}

std::string hex_of(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_number(const json& j, const char* where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == nullptr || *end != '\0' || end == s.c_str())
      throw ParseError(std::string("bad numeric literal '") + s + "' in " + where);
    return v;
  }
  throw ParseError(std::string("expected number or hex string in ") + where);
}

}  // namespace

int ReluNetwork::input_dim() const {
  require(!layers.empty(), "network has no layers");
  return layers.front().in_dim();
}

int ReluNetwork::output_dim() const {
  require(!layers.empty(), "network has no layers");
  return layers.back().out_dim();
}

int ReluNetwork::width() const {
  int w = 0;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l)
    w = std::max(w, layers[l].out_dim());
  return w;
}

std::vector<int> ReluNetwork::architecture() const {
  require(!layers.empty(), "network has no layers");
  std::vector<int> a;
  a.push_back(layers.front().in_dim());
  for (const auto& l : layers) a.push_back(l.out_dim());
  return a;
}

void ReluNetwork::validate() const {
  require(!layers.empty(), "network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    require(L.W.rows() == L.b.size(), "layer weight/bias row mismatch");
    if (l > 0)
      require(L.in_dim() == layers[l - 1].out_dim(),
              "layer " + std::to_string(l) + " input dim does not chain");
    require(L.W.allFinite() && L.b.allFinite(), "non-finite layer entries");
  }
  if (input_shift.size() != 0) {
    require(static_cast<int>(input_shift.size()) == layers.front().in_dim(),
            "input_shift length mismatch");
    require(input_shift.allFinite(), "non-finite input_shift");
  }
}

Eigen::VectorXd eval_vec(const ReluNetwork& net, const Eigen::VectorXd& x) {
  require(!net.layers.empty(), "network has no layers");
  require(x.size() == net.input_dim(), "input dimension mismatch");
  Eigen::VectorXd y = shifted_input(net, x);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    y = net.layers[l].W * y + net.layers[l].b;
    if (l + 1 < net.layers.size()) y = y.cwiseMax(0.0);
  }
  return y;
}

double eval(const ReluNetwork& net, const Eigen::VectorXd& x) {
  require(net.output_dim() == 1, "scalar eval on multi-output network");
  return eval_vec(net, x)[0];
}

Eigen::MatrixXd eval_batch(const ReluNetwork& net, const Eigen::MatrixXd& X) {
  require(!net.layers.empty(), "network has no layers");
  require(X.rows() == net.input_dim(), "input dimension mismatch");
  Eigen::MatrixXd Y = X;
  if (net.input_shift.size() != 0) Y.colwise() += net.input_shift;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Y = (net.layers[l].W * Y).colwise() + net.layers[l].b;
    if (l + 1 < net.layers.size()) Y = Y.cwiseMax(0.0);
  }
  return Y;
}

ReluNetwork compose(const ReluNetwork& first, const ReluNetwork& second) {
  require(!first.layers.empty() && !second.layers.empty(),
          "compose of empty network");
  require(first.output_dim() == second.input_dim(),
          "compose dimension mismatch: " + std::to_string(first.output_dim()) +
              " vs " + std::to_string(second.input_dim()));
  ReluNetwork out;
  out.input_shift = first.input_shift;
  out.layers.reserve(first.layers.size() + second.layers.size() - 1);
  for (std::size_t l = 0; l + 1 < first.layers.size(); ++l)
    out.layers.push_back(first.layers[l]);

  const AffineLayer& f = first.layers.back();
  const AffineLayer& s = second.layers.front();
  Eigen::VectorXd fb = f.b;
  if (second.input_shift.size() != 0) fb += second.input_shift;
  AffineLayer junction{s.W * f.W, s.W * fb + s.b};
  out.layers.push_back(std::move(junction));

  for (std::size_t l = 1; l < second.layers.size(); ++l)
    out.layers.push_back(second.layers[l]);
  return out;
}

ReluNetwork pad_width(const ReluNetwork& net, int k) {
  net.validate();
  const int w = net.width();
  if (k < w)
    throw UsageError("pad_width target " + std::to_string(k) +
                     " below current width " + std::to_string(w));
  if (net.depth() == 1) {
    if (k == 0) return net;
    throw UsageError("pad_width needs a hidden layer to pad");
  }
  ReluNetwork out = net;
  const int L = out.depth();
  for (int l = 0; l < L - 1; ++l) {
    const int extra = k - out.layers[l].out_dim();
    if (extra > 0) {
      Eigen::MatrixXd W = Eigen::MatrixXd::Zero(k, out.layers[l].in_dim());
      W.topRows(out.layers[l].out_dim()) = out.layers[l].W;
      Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
      b.head(out.layers[l].out_dim()) = out.layers[l].b;
      out.layers[l].W = std::move(W);
      out.layers[l].b = std::move(b);
    }
    // Widen the next layer's input to match; new columns are zero.
    const int next_in = out.layers[l].out_dim();
    if (out.layers[l + 1].in_dim() != next_in) {
      Eigen::MatrixXd W = Eigen::MatrixXd::Zero(out.layers[l + 1].out_dim(), next_in);
      W.leftCols(out.layers[l + 1].in_dim()) = out.layers[l + 1].W;
      out.layers[l + 1].W = std::move(W);
    }
  }
  if (out.meta.is_object()) out.meta["padded_width"] = k;
  return out;
}

std::string serialize(const ReluNetwork& net) {
  net.validate();
  json j;
  j["arch"] = net.architecture();
  json shift = json::array();
  json shift_dec = json::array();
  const Eigen::VectorXd sh = net.input_shift.size() != 0
                                 ? net.input_shift
                                 : Eigen::VectorXd::Zero(net.input_dim());
  for (Eigen::Index i = 0; i < sh.size(); ++i) {
    shift.push_back(hex_of(sh[i]));
    shift_dec.push_back(sh[i]);
  }
  j["input_shift"] = std::move(shift);
  j["input_shift_dec"] = std::move(shift_dec);
  json layers = json::array();
  for (const auto& L : net.layers) {
    json W = json::array(), Wd = json::array();
    for (Eigen::Index r = 0; r < L.W.rows(); ++r) {
      json row = json::array(), rowd = json::array();
      for (Eigen::Index c = 0; c < L.W.cols(); ++c) {
        row.push_back(hex_of(L.W(r, c)));
        rowd.push_back(L.W(r, c));
      }
      W.push_back(std::move(row));
      Wd.push_back(std::move(rowd));
    }
    json b = json::array(), bd = json::array();
    for (Eigen::Index r = 0; r < L.b.size(); ++r) {
      b.push_back(hex_of(L.b[r]));
      bd.push_back(L.b[r]);
    }
    layers.push_back(json{{"W", std::move(W)},
                          {"W_dec", std::move(Wd)},
                          {"b", std::move(b)},
                          {"b_dec", std::move(bd)}});
  }
  j["layers"] = std::move(layers);
  j["meta"] = net.meta;
  return j.dump(1);
}

ReluNetwork deserialize(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  try {
    if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array() ||
        j["layers"].empty())
      throw ParseError("network JSON must contain a non-empty 'layers' array");
    ReluNetwork net;
    for (const auto& L : j["layers"]) {
      if (!L.contains("W") || !L.contains("b") || !L["W"].is_array() ||
          L["b"].is_null())
        throw ParseError("layer must contain 'W' and 'b'");
      const auto& W = L["W"];
      const auto& b = L["b"];
      const Eigen::Index rows = static_cast<Eigen::Index>(W.size());
      if (rows == 0) throw ParseError("layer with zero rows");
      const Eigen::Index cols = static_cast<Eigen::Index>(W[0].size());
      AffineLayer layer;
      layer.W.resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(W[r].size()) != cols)
          throw ParseError("ragged weight matrix");
        for (Eigen::Index c = 0; c < cols; ++c)
          layer.W(r, c) = parse_number(W[r][c], "W");
      }
      if (static_cast<Eigen::Index>(b.size()) != rows)
        throw ParseError("bias length does not match weight rows");
      layer.b.resize(rows);
      for (Eigen::Index r = 0; r < rows; ++r)
        layer.b[r] = parse_number(b[r], "b");
      net.layers.push_back(std::move(layer));
    }
    if (j.contains("input_shift") && j["input_shift"].is_array()) {
      const auto& sh = j["input_shift"];
      net.input_shift.resize(static_cast<Eigen::Index>(sh.size()));
      for (Eigen::Index i = 0; i < net.input_shift.size(); ++i)
        net.input_shift[i] = parse_number(sh[i], "input_shift");
    }
    if (j.contains("meta")) net.meta = j["meta"];
    net.validate();
    if (j.contains("arch")) {
      const auto stated = j["arch"].get<std::vector<int>>();
      if (stated != net.architecture())
        throw ParseError("stated arch does not match layers");
    }
    return net;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

ReluNetwork affine_net(const Eigen::MatrixXd& W, const Eigen::VectorXd& b) {
  require(W.rows() == b.size(), "affine_net weight/bias mismatch");
  ReluNetwork n;
  n.layers.push_back(AffineLayer{W, b});
  return n;
}

ReluNetwork relu_identity(int dims, int depth) {
  require(dims >= 1 && depth >= 1, "relu_identity needs dims>=1, depth>=1");
  ReluNetwork n;
  for (int l = 0; l < depth; ++l)
    n.layers.push_back(AffineLayer{Eigen::MatrixXd::Identity(dims, dims),
                                   Eigen::VectorXd::Zero(dims)});
  return n;
}

ReluNetwork stack(std::span<const ReluNetwork> parts) {
  require(!parts.empty(), "stack of zero networks");
  const int L = parts[0].depth();
  for (const auto& p : parts)
    require(p.depth() == L, "stack requires equal depths");
  ReluNetwork out;
  int shift_len = 0;
  bool any_shift = false;
  for (const auto& p : parts) {
    shift_len += p.input_dim();
    if (p.input_shift.size() != 0) any_shift = true;
  }
  if (any_shift) {
    out.input_shift = Eigen::VectorXd::Zero(shift_len);
    int at = 0;
    for (const auto& p : parts) {
      if (p.input_shift.size() != 0)
        out.input_shift.segment(at, p.input_dim()) = p.input_shift;
      at += p.input_dim();
    }
  }
  for (int l = 0; l < L; ++l) {
    int rows = 0, cols = 0;
    for (const auto& p : parts) {
      rows += p.layers[l].out_dim();
      cols += p.layers[l].in_dim();
    }
    AffineLayer layer{Eigen::MatrixXd::Zero(rows, cols),
                      Eigen::VectorXd::Zero(rows)};
    int r = 0, c = 0;
    for (const auto& p : parts) {
      layer.W.block(r, c, p.layers[l].out_dim(), p.layers[l].in_dim()) =
          p.layers[l].W;
      layer.b.segment(r, p.layers[l].out_dim()) = p.layers[l].b;
      r += p.layers[l].out_dim();
      c += p.layers[l].in_dim();
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

ReluNetwork stack(const ReluNetwork& a, const ReluNetwork& b) {
  const ReluNetwork parts[] = {a, b};
  return stack(std::span<const ReluNetwork>(parts, 2));
}

ReluNetwork stack(const ReluNetwork& a, const ReluNetwork& b,
                  const ReluNetwork& c) {
  const ReluNetwork parts[] = {a, b, c};
  return stack(std::span<const ReluNetwork>(parts, 3));
}

ReluNetwork with_depth(const ReluNetwork& n, int depth) {
  require(depth >= n.depth(), "with_depth cannot shrink");
  if (depth == n.depth()) return n;
  return compose(relu_identity(n.input_dim(), depth - n.depth() + 1), n);
}

}  // namespace robustmem::net
