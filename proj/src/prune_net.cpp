// Copyright 2026 The AGP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#include "agp/prune_net.hpp"

#include <algorithm>
#include <cmath>

#include "agp/errors.hpp"

namespace agp {

namespace {

constexpr double kProbClamp = 1e-7;

void add_row_broadcast(Matrix& m, const Matrix& row) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += row(0, j);
  }
}

Matrix relu(const Matrix& m) {
  Matrix out = m;
  for (double& v : out.flat()) v = std::max(v, 0.0);
  return out;
}

void relu_backward_inplace(Matrix& grad, const Matrix& pre) {
  auto g = grad.flat();
  auto p = pre.flat();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (p[i] <= 0.0) g[i] = 0.0;
}

void check_features(const NodeFeatures& x, const PruneNetParams& params) {
  if (x.x.rows() < 2) throw DimensionError("node features need agent rows plus a query row");
  if (x.x.cols() != params.w_gcn1.rows())
    throw DimensionError("node features have width " + std::to_string(x.x.cols()) +
                         ", network expects " + std::to_string(params.w_gcn1.rows()));
}

/// Everything the backward pass needs.
struct Activations {
  Matrix mean_x;  // 1 x d
  Matrix p1;      // (n+1) x h pre-activation
  Matrix h1;      // relu(p1)
  Matrix mean_h1; // 1 x h
  Matrix z;       // n x h
  Matrix zb;      // z * B
  Matrix logits;  // z B z^T
  Matrix a;       // mlp pre-activation, n x h_m
  Matrix r;       // relu(a)
  std::vector<double> s;
};

Activations run_forward(const NodeFeatures& x, const PruneNetParams& p) {
  check_features(x, p);
  Activations act;
  act.mean_x = column_mean(x.x);
  act.p1 = matmul(x.x, p.w_self1);
  add_row_broadcast(act.p1, matmul(act.mean_x, p.w_gcn1));
  act.h1 = relu(act.p1);
  act.mean_h1 = column_mean(act.h1);
  Matrix p2 = matmul(act.h1, p.w_self2);
  add_row_broadcast(p2, matmul(act.mean_h1, p.w_gcn2));
  act.z = top_rows(p2, x.n_max());

  act.zb = matmul(act.z, p.b_edge);
  act.logits = matmul_nt(act.zb, act.z);

  act.a = matmul(act.z, p.mlp_w1);
  add_row_broadcast(act.a, p.mlp_b1);
  act.r = relu(act.a);
  const Matrix s = matmul(act.r, p.mlp_w2);
  act.s.resize(s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) act.s[i] = s(i, 0) + p.mlp_b2(0, 0);
  return act;
}

double bce_term(double p, bool positive) { return positive ? -std::log(p) : -std::log(1.0 - p); }

double bce_grad(double p, bool positive) { return positive ? -1.0 / p : 1.0 / (1.0 - p); }

double focal_term(double p, bool positive, double gamma) {
  return positive ? -std::pow(1.0 - p, gamma) * std::log(p)
                  : -std::pow(p, gamma) * std::log(1.0 - p);
}

double focal_grad(double p, bool positive, double gamma) {
  if (positive)
    return gamma * std::pow(1.0 - p, gamma - 1.0) * std::log(p) - std::pow(1.0 - p, gamma) / p;
  return -gamma * std::pow(p, gamma - 1.0) * std::log(1.0 - p) + std::pow(p, gamma) / (1.0 - p);
}

struct NodeLossParts {
  double value = 0.0;
  std::vector<double> d_yhat;  // d loss / d y_hat
  Matrix d_w;                  // d loss / d w_pred (coherence term)
};

NodeLossParts node_loss_parts(std::span<const double> y_hat, const NodeMask& y,
                              const Matrix& w_pred, double lambda_s, double lambda_c, bool focal,
                              double gamma) {
  const std::size_t n = y.n();
  if (y_hat.size() != n || w_pred.rows() != n || w_pred.cols() != n)
    throw DimensionError("node loss: inconsistent sizes");
  const double inv_n = 1.0 / static_cast<double>(n);
  NodeLossParts out;
  out.d_yhat.assign(n, 0.0);
  out.d_w = Matrix(n, n);
  double cls = 0.0;
  double mean_yhat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = y_hat[i];
    const double p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
    const bool pos = y[i];
    cls += focal ? focal_term(p, pos, gamma) : bce_term(p, pos);
    if (p == raw) {
      out.d_yhat[i] = (focal ? focal_grad(p, pos, gamma) : bce_grad(p, pos)) * inv_n;
    } else if (raw > 0.0 && raw < 1.0) {
      out.d_yhat[i] = (raw - (pos ? 1.0 : 0.0)) / (raw * (1.0 - raw)) * inv_n;
    }
    out.d_yhat[i] += lambda_s * inv_n;
    mean_yhat += raw;
  }
  double coherence = 0.0;
  const double coh_scale = lambda_c * inv_n * inv_n;
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = w_pred(i, j);
      coherence += std::fabs(w);
      out.d_w(i, j) = coh_scale * (w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0));
    }
  }
  out.value = cls * inv_n + lambda_s * mean_yhat * inv_n + coh_scale * coherence;
  return out;
}

struct EdgeLossParts {
  double value = 0.0;
  Matrix d_w;
};

EdgeLossParts edge_loss_parts(const Matrix& w_pred, const WeightMatrix& a_gt, const NodeMask& y,
                              double lambda_off) {
  const std::size_t n = y.n();
  if (a_gt.n() != n || w_pred.rows() != n || w_pred.cols() != n)
    throw DimensionError("edge loss: inconsistent sizes");
  double on_count = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && y[i] && y[j]) on_count += 1.0;
  const double off_count = static_cast<double>(n * (n - 1)) - on_count;
  EdgeLossParts out;
  out.d_w = Matrix(n, n);
  double on_sum = 0.0;
  double off_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = w_pred(i, j);
      if (y[i] && y[j]) {
        const double diff = w - a_gt(i, j);
        on_sum += diff * diff;
        out.d_w(i, j) = 2.0 * diff / on_count;
      } else {
        off_sum += w * w;
        out.d_w(i, j) = lambda_off * 2.0 * w / off_count;
      }
    }
  }
  if (on_count > 0.0) out.value += on_sum / on_count;
  if (off_count > 0.0) out.value += lambda_off * off_sum / off_count;
  return out;
}

}  // namespace

PruneNetParams PruneNetParams::zeros(const NetShape& s) {
  return {Matrix(s.d, s.h),   Matrix(s.d, s.h),   Matrix(s.h, s.h),
          Matrix(s.h, s.h),   Matrix(s.h, s.h),   Matrix(s.h, s.h_m),
          Matrix(1, s.h_m),   Matrix(s.h_m, 1),   Matrix(1, 1)};
}

PruneNetParams PruneNetParams::initialize(const NetShape& shape, Rng& rng) {
  PruneNetParams p = zeros(shape);
  auto tensors = p.tensors();
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    if (is_bias(t)) continue;
    Matrix& m = *tensors[t];
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& v : m.flat()) v = u(rng);
  }
  return p;
}

std::array<Matrix*, PruneNetParams::kTensorCount> PruneNetParams::tensors() {
  return {&w_gcn1, &w_self1, &w_gcn2, &w_self2, &b_edge, &mlp_w1, &mlp_b1, &mlp_w2, &mlp_b2};
}

std::array<const Matrix*, PruneNetParams::kTensorCount> PruneNetParams::tensors() const {
  return {&w_gcn1, &w_self1, &w_gcn2, &w_self2, &b_edge, &mlp_w1, &mlp_b1, &mlp_w2, &mlp_b2};
}

const std::array<std::string_view, PruneNetParams::kTensorCount>& PruneNetParams::tensor_names() {
  static const std::array<std::string_view, kTensorCount> names = {
      "w_gcn1", "w_self1", "w_gcn2", "w_self2", "b_edge",
      "mlp_w1", "mlp_b1",  "mlp_w2", "mlp_b2"};
  return names;
}

bool PruneNetParams::is_bias(std::size_t tensor_index) {
  return tensor_index == 6 || tensor_index == 8;
}

bool PruneNetParams::all_finite() const {
  for (const Matrix* m : tensors())
    for (double v : m->flat())
      if (!std::isfinite(v)) return false;
  return true;
}

Matrix gcn_forward(const NodeFeatures& x, const PruneNetParams& params) {
  return run_forward(x, params).z;
}

Matrix edge_logits(const Matrix& z, const PruneNetParams& params) {
  return matmul_nt(matmul(z, params.b_edge), z);
}

WeightMatrix edge_head(const Matrix& z, const PruneNetParams& params) {
  Matrix w = edge_logits(z, params);
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = i == j ? 0.0 : sigmoid(w(i, j));
  return WeightMatrix(std::move(w));
}

std::pair<std::vector<double>, std::vector<double>> node_head(const Matrix& z,
                                                              const PruneNetParams& params) {
  Matrix a = matmul(z, params.mlp_w1);
  add_row_broadcast(a, params.mlp_b1);
  const Matrix s_col = matmul(relu(a), params.mlp_w2);
  std::vector<double> s(z.rows());
  std::vector<double> y(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    s[i] = s_col(i, 0) + params.mlp_b2(0, 0);
    y[i] = sigmoid(s[i]);
  }
  return {std::move(s), std::move(y)};
}

ForwardOutput forward(const NodeFeatures& x, const PruneNetParams& params) {
  ForwardOutput out;
  out.z = gcn_forward(x, params);
  out.w_pred = edge_head(out.z, params);
  std::tie(out.s, out.y_hat) = node_head(out.z, params);
  return out;
}

double sample_gumbel(Rng& rng) { return -std::log(-std::log(uniform_open01(rng))); }

double gumbel_sigmoid(double logit, double tau, Rng& rng, GumbelMode mode, bool hard) {
  if (!(tau > 0.0)) throw ConfigError("gumbel_sigmoid: tau must be > 0");
  double t = logit;
  if (mode == GumbelMode::kStochastic) t += sample_gumbel(rng) - sample_gumbel(rng);
  const double soft = sigmoid(t / tau);
  if (!hard) return soft;
  return soft >= 0.5 ? 1.0 : 0.0;
}

std::vector<double> gumbel_sigmoid(std::span<const double> logits, double tau, Rng& rng,
                                   GumbelMode mode, bool hard) {
  std::vector<double> out;
  out.reserve(logits.size());
  for (double l : logits) out.push_back(gumbel_sigmoid(l, tau, rng, mode, hard));
  return out;
}

double gumbel_sigmoid_grad(double soft_sample, double tau) {
  return soft_sample * (1.0 - soft_sample) / tau;
}

double edge_loss(const Matrix& w_pred, const WeightMatrix& a_gt, const NodeMask& y,
                 double lambda_off) {
  return edge_loss_parts(w_pred, a_gt, y, lambda_off).value;
}

double node_loss(std::span<const double> y_hat, const NodeMask& y, const Matrix& w_pred,
                 double lambda_s, double lambda_c, bool focal, double focal_gamma) {
  return node_loss_parts(y_hat, y, w_pred, lambda_s, lambda_c, focal, focal_gamma).value;
}

LogitNoise sample_logit_noise(std::size_t n, bool edges, bool nodes, Rng& rng) {
  LogitNoise noise;
  if (edges) {
    noise.edge = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) noise.edge(i, j) = sample_gumbel(rng) - sample_gumbel(rng);
  }
  if (nodes) {
    noise.node.resize(n);
    for (double& v : noise.node) v = sample_gumbel(rng) - sample_gumbel(rng);
  }
  return noise;
}

LossBreakdown loss_and_gradient(const NodeFeatures& x, const WeightMatrix& a_gt,
                                const NodeMask& y, const PruneNetParams& params,
                                const LogitNoise& noise, double tau, bool focal,
                                const LossWeights& lw, PruneNetParams* grad, double grad_scale) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be > 0");
  const Activations act = run_forward(x, params);
  const std::size_t n = act.z.rows();
  if (y.n() != n || a_gt.n() != n)
    throw DimensionError("supervision pair has " + std::to_string(y.n()) +
                         " nodes, features describe " + std::to_string(n));
  const bool edge_noise = noise.edge.rows() == n;
  const bool node_noise = noise.node.size() == n;

  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        w(i, j) = sigmoid((act.logits(i, j) + (edge_noise ? noise.edge(i, j) : 0.0)) / tau);
  std::vector<double> y_hat(n);
  for (std::size_t i = 0; i < n; ++i)
    y_hat[i] = sigmoid((act.s[i] + (node_noise ? noise.node[i] : 0.0)) / tau);

  const EdgeLossParts edge = edge_loss_parts(w, a_gt, y, lw.lambda_off);
  const NodeLossParts node =
      node_loss_parts(y_hat, y, w, lw.lambda_s, lw.lambda_c, focal, lw.focal_gamma);
  LossBreakdown out{edge.value, node.value, total_loss(edge.value, node.value, lw.beta)};
  if (!grad) return out;

  // Logit gradients.
  Matrix d_logits(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        d_logits(i, j) = (edge.d_w(i, j) + lw.beta * node.d_w(i, j)) *
                         gumbel_sigmoid_grad(w(i, j), tau) * grad_scale;
  Matrix d_s(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    d_s(i, 0) = lw.beta * node.d_yhat[i] * gumbel_sigmoid_grad(y_hat[i], tau) * grad_scale;

  // Edge head.
  grad->b_edge += matmul_tn(act.z, matmul(d_logits, act.z));
  Matrix d_z = matmul(d_logits, matmul_nt(act.z, params.b_edge));
  d_z += matmul_tn(d_logits, act.zb);

  // Node head.
  grad->mlp_w2 += matmul_tn(act.r, d_s);
  grad->mlp_b2 += column_sum(d_s);
  Matrix d_a = matmul_nt(d_s, params.mlp_w2);
  relu_backward_inplace(d_a, act.a);
  grad->mlp_w1 += matmul_tn(act.z, d_a);
  grad->mlp_b1 += column_sum(d_a);
  d_z += matmul_nt(d_a, params.mlp_w1);

  // GCN layer 2; the query row receives no gradient from the heads.
  const std::size_t rows = n + 1;
  const double inv_rows = 1.0 / static_cast<double>(rows);
  Matrix d_p2(rows, d_z.cols());
  std::copy(d_z.flat().begin(), d_z.flat().end(), d_p2.flat().begin());
  const Matrix cs2 = column_sum(d_p2);
  grad->w_self2 += matmul_tn(act.h1, d_p2);
  grad->w_gcn2 += matmul_tn(act.mean_h1, cs2);
  Matrix d_h1 = matmul_nt(d_p2, params.w_self2);
  Matrix spread2 = matmul_nt(cs2, params.w_gcn2);
  spread2 *= inv_rows;
  add_row_broadcast(d_h1, spread2);

  // GCN layer 1.
  relu_backward_inplace(d_h1, act.p1);
  const Matrix cs1 = column_sum(d_h1);
  grad->w_self1 += matmul_tn(x.x, d_h1);
  grad->w_gcn1 += matmul_tn(act.mean_x, cs1);
  return out;
}

}  // namespace agp
