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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "agp/errors.hpp"
#include "agp/prune_net.hpp"
#include "json_util.hpp"

namespace agp {

namespace {

constexpr std::string_view kCheckpointFormat = "agp-prune-net";
constexpr int kCheckpointVersion = 1;

class Adam {
 public:
  Adam(const PruneNetParams& like, const TrainConfig& cfg)
      : cfg_(cfg), m_(PruneNetParams::zeros(like.shape())), v_(PruneNetParams::zeros(like.shape())) {}

  void step(PruneNetParams& params, const PruneNetParams& grad) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));
    auto p = params.tensors();
    auto g = grad.tensors();
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (std::size_t k = 0; k < PruneNetParams::kTensorCount; ++k) {
      auto pf = p[k]->flat();
      auto gf = g[k]->flat();
      auto mf = m[k]->flat();
      auto vf = v[k]->flat();
      const bool decay = !PruneNetParams::is_bias(k);
      for (std::size_t i = 0; i < pf.size(); ++i) {
        mf[i] = cfg_.adam_beta1 * mf[i] + (1.0 - cfg_.adam_beta1) * gf[i];
        vf[i] = cfg_.adam_beta2 * vf[i] + (1.0 - cfg_.adam_beta2) * gf[i] * gf[i];
        const double mhat = mf[i] / bc1;
        const double vhat = vf[i] / bc2;
        // Decoupled weight decay acts on the weight directly.
        if (decay) pf[i] -= cfg_.lr * cfg_.weight_decay * pf[i];
        pf[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
      }
    }
  }

 private:
  TrainConfig cfg_;
  PruneNetParams m_;
  PruneNetParams v_;
  std::size_t t_ = 0;
};

/// Agent rows are shared; only the query row changes per task text.
class FeatureCache {
 public:
  FeatureCache(const AgentPool& pool, EmbeddingBackend& backend)
      : backend_(backend), base_(build_node_features(pool, "", backend)) {}

  const NodeFeatures& get(const std::string& text) {
    auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
    NodeFeatures f = base_;
    const auto q = embed_text(backend_, text);
    std::copy(q.begin(), q.end(), f.x.row(f.n_max()).begin());
    return cache_.emplace(text, std::move(f)).first->second;
  }

 private:
  EmbeddingBackend& backend_;
  NodeFeatures base_;
  std::map<std::string, NodeFeatures> cache_;
};

}  // namespace

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
  };
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0");
  };
  nonneg(lr, "lr");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1 must be in [0,1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2 must be in [0,1)");
  positive(adam_eps, "adam_eps");
  nonneg(weight_decay, "weight_decay");
  if (epochs == 0) throw ConfigError("epochs must be >= 1");
  if (batch == 0) throw ConfigError("batch must be >= 1");
  nonneg(lambda_off, "lambda_off");
  nonneg(lambda_s, "lambda_s");
  nonneg(coherence_lambda_c, "lambda_c");
  nonneg(objective_lambda_c, "objective_lambda_c");
  nonneg(beta, "beta");
  positive(tau_start, "tau_start");
  positive(tau_end, "tau_end");
  if (tau_start < tau_end) throw ConfigError("tau_start must be >= tau_end");
  nonneg(focal_gamma, "focal_gamma");
  nonneg(focal_threshold, "focal_threshold");
  if (hidden == 0 || mask_hidden == 0) throw ConfigError("hidden sizes must be >= 1");
}

double tau_at(const TrainConfig& cfg, std::size_t step, std::size_t total_steps) {
  if (total_steps <= 1) return cfg.tau_start;
  const double frac = static_cast<double>(step) / static_cast<double>(total_steps - 1);
  return cfg.tau_start + (cfg.tau_end - cfg.tau_start) * std::min(frac, 1.0);
}

TrainResult train(std::span<const SupervisionPair> corpus, const AgentPool& pool,
                  EmbeddingBackend& backend, const TrainConfig& cfg,
                  const std::function<void(const TrainLogRow&)>& on_step) {
  cfg.validate();
  Rng init_rng(derive_seed(cfg.seed, "init"));
  auto params =
      PruneNetParams::initialize({backend.dim(), cfg.hidden, cfg.mask_hidden}, init_rng);
  return train_from(std::move(params), corpus, pool, backend, cfg, on_step);
}

TrainResult train_from(PruneNetParams params, std::span<const SupervisionPair> corpus,
                       const AgentPool& pool, EmbeddingBackend& backend, const TrainConfig& cfg,
                       const std::function<void(const TrainLogRow&)>& on_step) {
  cfg.validate();
  if (corpus.empty()) throw ConfigError("training corpus is empty");
  if (params.shape().d != backend.dim())
    throw DimensionError("network input width " + std::to_string(params.shape().d) +
                         " differs from embedding dim " + std::to_string(backend.dim()));
  const std::size_t n = pool.n_max();
  for (const auto& p : corpus) {
    validate(p);
    if (p.y.n() != n)
      throw DimensionError("pair " + p.task_id + " has " + std::to_string(p.y.n()) +
                           " nodes, pool has " + std::to_string(n));
  }

  FeatureCache features(pool, backend);
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  Rng noise_rng(derive_seed(cfg.seed, "gumbel"));
  const LossWeights lw = cfg.loss_weights();
  const std::size_t steps_per_epoch = (corpus.size() + cfg.batch - 1) / cfg.batch;
  const std::size_t total_steps = steps_per_epoch * cfg.epochs;

  Adam adam(params, cfg);
  TrainResult result;
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch, ++step) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch);
      const double batch_size = static_cast<double>(stop - start);
      std::size_t active = 0;
      for (std::size_t k = start; k < stop; ++k) active += corpus[order[k]].y.active_count();
      const bool focal =
          static_cast<double>(active) < cfg.focal_threshold * batch_size * static_cast<double>(n);
      const double tau = tau_at(cfg, step, total_steps);

      PruneNetParams grad = PruneNetParams::zeros(params.shape());
      TrainLogRow row{step, 0.0, 0.0, 0.0, tau, focal};
      for (std::size_t k = start; k < stop; ++k) {
        const SupervisionPair& pair = corpus[order[k]];
        const LogitNoise noise = sample_logit_noise(n, cfg.gumbel_edges, cfg.gumbel_nodes, noise_rng);
        const LossBreakdown loss = loss_and_gradient(features.get(pair.task_text), pair.a_gt,
                                                     pair.y, params, noise, tau, focal, lw, &grad,
                                                     1.0 / batch_size);
        row.edge_loss += loss.edge / batch_size;
        row.node_loss += loss.node / batch_size;
        row.total += loss.total / batch_size;
      }
      if (!std::isfinite(row.total) || !grad.all_finite()) throw TrainingDiverged(step);
      adam.step(params, grad);
      if (!params.all_finite()) throw TrainingDiverged(step);
      result.log.push_back(row);
      if (on_step) on_step(row);
    }
  }

  auto epoch_mean = [&](std::size_t epoch) {
    double sum = 0.0;
    for (std::size_t s = epoch * steps_per_epoch; s < (epoch + 1) * steps_per_epoch; ++s)
      sum += result.log[s].total;
    return sum / static_cast<double>(steps_per_epoch);
  };
  result.initial_loss = epoch_mean(0);
  result.final_loss = epoch_mean(cfg.epochs - 1);
  result.params = std::move(params);
  return result;
}

std::string train_log_csv(std::span<const TrainLogRow> log) {
  std::string out = "step,edge_loss,node_loss,total,tau\n";
  char buf[160];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g\n", r.step, r.edge_loss, r.node_loss,
                  r.total, r.tau);
    out += buf;
  }
  return out;
}

CommTopology design_topology(std::string_view query, const AgentPool& pool,
                             EmbeddingBackend& backend, const PruneNetParams& params,
                             double theta) {
  const NodeFeatures x = build_node_features(pool, query, backend);
  const ForwardOutput out = forward(x, params);
  const std::size_t n = pool.n_max();
  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t i = 0; i < n; ++i) bits[i] = out.y_hat[i] >= theta ? 1 : 0;
  NodeMask mask(bits);
  if (mask.active_count() < 2) {
    std::vector<AgentId> ids(n);
    std::iota(ids.begin(), ids.end(), AgentId{0});
    std::stable_sort(ids.begin(), ids.end(),
                     [&](AgentId a, AgentId b) { return out.y_hat[a] > out.y_hat[b]; });
    std::fill(bits.begin(), bits.end(), 0);
    bits[ids[0]] = 1;
    bits[ids[1]] = 1;
    mask = NodeMask(bits);
  }
  return induce(out.w_pred, mask);
}

std::string dump_checkpoint(const Checkpoint& ckpt) {
  nlohmann::ordered_json j;
  const NetShape shape = ckpt.params.shape();
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["d"] = shape.d;
  j["h"] = shape.h;
  j["h_m"] = shape.h_m;
  j["n_max"] = ckpt.n_max;
  const TrainConfig& c = ckpt.config;
  j["config"] = {{"lr", c.lr},
                 {"adam_beta1", c.adam_beta1},
                 {"adam_beta2", c.adam_beta2},
                 {"weight_decay", c.weight_decay},
                 {"epochs", c.epochs},
                 {"batch", c.batch},
                 {"lambda_off", c.lambda_off},
                 {"lambda_s", c.lambda_s},
                 {"lambda_c", c.coherence_lambda_c},
                 {"objective_lambda_c", c.objective_lambda_c},
                 {"beta", c.beta},
                 {"tau_start", c.tau_start},
                 {"tau_end", c.tau_end},
                 {"focal_gamma", c.focal_gamma},
                 {"focal_threshold", c.focal_threshold},
                 {"gumbel_edges", c.gumbel_edges},
                 {"gumbel_nodes", c.gumbel_nodes},
                 {"seed", c.seed}};
  nlohmann::ordered_json tensors;
  const auto& names = PruneNetParams::tensor_names();
  const auto ts = ckpt.params.tensors();
  for (std::size_t k = 0; k < PruneNetParams::kTensorCount; ++k)
    tensors[std::string(names[k])] =
        std::vector<double>(ts[k]->flat().begin(), ts[k]->flat().end());
  j["tensors"] = std::move(tensors);
  return j.dump();
}

Checkpoint parse_checkpoint(std::string_view text) {
  detail::json j;
  try {
    j = detail::json::parse(text);
  } catch (const detail::json::exception& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat)
      throw CheckpointError("not a prune-net checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw CheckpointError("unsupported checkpoint version " +
                            std::to_string(j["version"].get<int>()));
    NetShape shape{j.at("d").get<std::size_t>(), j.at("h").get<std::size_t>(),
                   j.at("h_m").get<std::size_t>()};
    Checkpoint ckpt;
    ckpt.n_max = j.at("n_max").get<std::size_t>();
    ckpt.params = PruneNetParams::zeros(shape);
    const auto& names = PruneNetParams::tensor_names();
    auto ts = ckpt.params.tensors();
    for (std::size_t k = 0; k < PruneNetParams::kTensorCount; ++k) {
      const auto values = j.at("tensors").at(std::string(names[k])).get<std::vector<double>>();
      if (values.size() != ts[k]->size())
        throw CheckpointError("tensor " + std::string(names[k]) + " has " +
                              std::to_string(values.size()) + " values, shape needs " +
                              std::to_string(ts[k]->size()));
      std::copy(values.begin(), values.end(), ts[k]->flat().begin());
    }
    if (!ckpt.params.all_finite()) throw CheckpointError("checkpoint has non-finite values");
    const auto& c = j.at("config");
    TrainConfig& cfg = ckpt.config;
    cfg.lr = c.value("lr", cfg.lr);
    cfg.adam_beta1 = c.value("adam_beta1", cfg.adam_beta1);
    cfg.adam_beta2 = c.value("adam_beta2", cfg.adam_beta2);
    cfg.weight_decay = c.value("weight_decay", cfg.weight_decay);
    cfg.epochs = c.value("epochs", cfg.epochs);
    cfg.batch = c.value("batch", cfg.batch);
    cfg.lambda_off = c.value("lambda_off", cfg.lambda_off);
    cfg.lambda_s = c.value("lambda_s", cfg.lambda_s);
    cfg.coherence_lambda_c = c.value("lambda_c", cfg.coherence_lambda_c);
    cfg.objective_lambda_c = c.value("objective_lambda_c", cfg.objective_lambda_c);
    cfg.beta = c.value("beta", cfg.beta);
    cfg.tau_start = c.value("tau_start", cfg.tau_start);
    cfg.tau_end = c.value("tau_end", cfg.tau_end);
    cfg.focal_gamma = c.value("focal_gamma", cfg.focal_gamma);
    cfg.focal_threshold = c.value("focal_threshold", cfg.focal_threshold);
    cfg.gumbel_edges = c.value("gumbel_edges", cfg.gumbel_edges);
    cfg.gumbel_nodes = c.value("gumbel_nodes", cfg.gumbel_nodes);
    cfg.seed = c.value("seed", cfg.seed);
    cfg.hidden = shape.h;
    cfg.mask_hidden = shape.h_m;
    return ckpt;
  } catch (const detail::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace agp
