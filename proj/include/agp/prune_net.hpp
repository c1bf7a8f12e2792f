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

// Dual-pruning network.
//
// A two-layer graph convolution runs over the complete graph on the n_max
// agents plus one virtual query node. On a complete graph with self-loops
// the normalized adjacency is the uniform averaging matrix, so every
// layer is
//
//   H' = act(H * W_self + mean_rows(H) * W_neigh)
//
// where the per-node self term keeps agents distinguishable. The second
// layer has no activation and there are no biases. The agent rows of the
// output form the latent Z, which feeds
//
//   edge head:  W_ij = sigmoid(z_i^T B z_j), zero diagonal
//   node head:  s_i = w2 . relu(W1^T z_i + b1) + b2,  y_i = sigmoid(s_i)
//
// Training perturbs both heads' logits with Gumbel-Sigmoid noise at an
// annealed temperature. Gradients are hand-derived for this fixed graph.

#ifndef AGP_PRUNE_NET_HPP_
#define AGP_PRUNE_NET_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agp/agent_pool.hpp"
#include "agp/embedder.hpp"
#include "agp/graph.hpp"
#include "agp/matrix.hpp"
#include "agp/random.hpp"

namespace agp {

struct NetShape {
  std::size_t d = kDefaultEmbeddingDim;
  std::size_t h = 64;
  std::size_t h_m = 32;

  friend bool operator==(const NetShape&, const NetShape&) = default;
};

struct PruneNetParams {
  Matrix w_gcn1;   // d x h, neighbourhood weight of layer 1
  Matrix w_self1;  // d x h
  Matrix w_gcn2;   // h x h
  Matrix w_self2;  // h x h
  Matrix b_edge;   // h x h bilinear form
  Matrix mlp_w1;   // h x h_m
  Matrix mlp_b1;   // 1 x h_m
  Matrix mlp_w2;   // h_m x 1
  Matrix mlp_b2;   // 1 x 1

  static constexpr std::size_t kTensorCount = 9;

  static PruneNetParams zeros(const NetShape& shape);
  /// Glorot-uniform matrices, zero biases.
  static PruneNetParams initialize(const NetShape& shape, Rng& rng);

  NetShape shape() const { return {w_gcn1.rows(), w_gcn1.cols(), mlp_w1.cols()}; }

  std::array<Matrix*, kTensorCount> tensors();
  std::array<const Matrix*, kTensorCount> tensors() const;
  static const std::array<std::string_view, kTensorCount>& tensor_names();
  /// Biases are exempt from weight decay.
  static bool is_bias(std::size_t tensor_index);

  bool all_finite() const;
  friend bool operator==(const PruneNetParams&, const PruneNetParams&) = default;
};

struct ForwardOutput {
  Matrix z;                   // n_max x h
  WeightMatrix w_pred;        // n_max x n_max
  std::vector<double> y_hat;  // sigmoid(s)
  std::vector<double> s;      // node logits
};

/// Latent agent rows. Throws DimensionError when x does not match params.
Matrix gcn_forward(const NodeFeatures& x, const PruneNetParams& params);

/// Raw bilinear logits z_i^T B z_j (diagonal included).
Matrix edge_logits(const Matrix& z, const PruneNetParams& params);
WeightMatrix edge_head(const Matrix& z, const PruneNetParams& params);

/// Returns (s, y_hat).
std::pair<std::vector<double>, std::vector<double>> node_head(const Matrix& z,
                                                              const PruneNetParams& params);

/// Deterministic forward pass (no noise, tau = 1).
ForwardOutput forward(const NodeFeatures& x, const PruneNetParams& params);

enum class GumbelMode { kStochastic, kDeterministic };

/// Standard Gumbel draw, -log(-log(u)).
double sample_gumbel(Rng& rng);

/// stochastic: sigmoid((logit + g1 - g2) / tau); deterministic:
/// sigmoid(logit / tau). `hard` rounds the result to {0,1} (>= 0.5 -> 1).
double gumbel_sigmoid(double logit, double tau, Rng& rng, GumbelMode mode, bool hard);
std::vector<double> gumbel_sigmoid(std::span<const double> logits, double tau, Rng& rng,
                                   GumbelMode mode, bool hard);
/// d(sample)/d(logit) given the soft sample; straight-through for hard
/// samples, i.e. the rounding is treated as the identity.
double gumbel_sigmoid_grad(double soft_sample, double tau);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Masked MSE on edges among ground-truth nodes plus an off-support penalty
/// weighted by lambda_off. Terms with an empty support contribute 0.
double edge_loss(const Matrix& w_pred, const WeightMatrix& a_gt, const NodeMask& y,
                 double lambda_off);

/// Mean BCE (or focal loss with exponent `focal_gamma` when focal) plus
/// lambda_s * mean(y_hat) plus lambda_c / n^2 * outgoing |w| of absent nodes.
double node_loss(std::span<const double> y_hat, const NodeMask& y, const Matrix& w_pred,
                 double lambda_s, double lambda_c, bool focal, double focal_gamma = 2.0);

inline double total_loss(double edge, double node, double beta) { return edge + beta * node; }

struct LossWeights {
  double lambda_off = 0.5;
  double lambda_s = 0.1;
  double lambda_c = 0.05;  // coherence weight of the node loss
  double beta = 1.0;
  double focal_gamma = 2.0;
};

struct LossBreakdown {
  double edge = 0.0;
  double node = 0.0;
  double total = 0.0;
};

/// Logistic perturbations (g1 - g2) added to the logits before the
/// tempered sigmoid. Empty members mean no noise on that head.
struct LogitNoise {
  Matrix edge;                // n x n or empty
  std::vector<double> node;   // n or empty
};

LogitNoise sample_logit_noise(std::size_t n, bool edges, bool nodes, Rng& rng);

/// Loss of one supervision pair at temperature `tau`; when `grad` is given,
/// the parameter gradient is accumulated into it scaled by `grad_scale`.
LossBreakdown loss_and_gradient(const NodeFeatures& x, const WeightMatrix& a_gt,
                                const NodeMask& y, const PruneNetParams& params,
                                const LogitNoise& noise, double tau, bool focal,
                                const LossWeights& weights, PruneNetParams* grad = nullptr,
                                double grad_scale = 1.0);

struct TrainConfig {
  double lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.95;
  double adam_eps = 1e-8;
  double weight_decay = 1e-5;
  std::size_t epochs = 20;
  std::size_t batch = 10;
  double lambda_off = 0.5;
  double lambda_s = 0.1;
  double coherence_lambda_c = 0.05;
  // Cost weight of the graph objective. Recorded for provenance only; no
  // loss term reads it.
  double objective_lambda_c = 0.0;
  double beta = 1.0;
  double tau_start = 1.0;
  double tau_end = 0.1;
  double focal_gamma = 2.0;
  double focal_threshold = 0.20;
  bool gumbel_edges = true;
  bool gumbel_nodes = true;
  std::size_t hidden = 64;
  std::size_t mask_hidden = 32;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
  LossWeights loss_weights() const {
    return {lambda_off, lambda_s, coherence_lambda_c, beta, focal_gamma};
  }
};

struct TrainLogRow {
  std::size_t step = 0;
  double edge_loss = 0.0;
  double node_loss = 0.0;
  double total = 0.0;
  double tau = 0.0;
  bool focal = false;
};

struct TrainResult {
  PruneNetParams params;
  std::vector<TrainLogRow> log;
  /// Mean total loss over the first and the last epoch.
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Linear temperature schedule over `total_steps` optimizer steps.
double tau_at(const TrainConfig& cfg, std::size_t step, std::size_t total_steps);

/// Adam with decoupled weight decay over minibatches of cfg.batch pairs.
/// Throws TrainingDiverged on a non-finite loss, ConfigError on bad input.
TrainResult train(std::span<const SupervisionPair> corpus, const AgentPool& pool,
                  EmbeddingBackend& backend, const TrainConfig& cfg,
                  const std::function<void(const TrainLogRow&)>& on_step = {});

/// Continues from `initial` instead of a fresh initialization.
TrainResult train_from(PruneNetParams initial, std::span<const SupervisionPair> corpus,
                       const AgentPool& pool, EmbeddingBackend& backend, const TrainConfig& cfg,
                       const std::function<void(const TrainLogRow&)>& on_step = {});

std::string train_log_csv(std::span<const TrainLogRow> log);

/// Deterministic inference: keep agents with y_hat >= theta (top two by
/// y_hat when fewer pass) and the induced predicted weights.
CommTopology design_topology(std::string_view query, const AgentPool& pool,
                             EmbeddingBackend& backend, const PruneNetParams& params,
                             double theta = 0.5);

struct Checkpoint {
  PruneNetParams params;
  std::size_t n_max = 0;
  TrainConfig config;
};

/// Versioned JSON container with shapes, config and flat tensors.
std::string dump_checkpoint(const Checkpoint& ckpt);
/// Throws CheckpointError on version or shape mismatch.
Checkpoint parse_checkpoint(std::string_view text);

}  // namespace agp

#endif  // AGP_PRUNE_NET_HPP_
