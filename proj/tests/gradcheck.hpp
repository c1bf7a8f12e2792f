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


// Central finite-difference check of the analytic loss gradient.

#ifndef AGP_TESTS_GRADCHECK_HPP_
#define AGP_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "agp/prune_net.hpp"

namespace gradcheck {

struct Result {
  double max_rel = 0.0;
  std::size_t checked = 0;
};

/// |fd - an| / max(|fd| + |an|, floor); the floor keeps roundoff on
/// near-zero entries from dominating.
inline double rel_error(double fd, double an, double floor = 1e-3) {
  return std::abs(fd - an) / std::max(std::abs(fd) + std::abs(an), floor);
}

/// One random instance: random features, parameters (biases included),
/// mask, labels, logit noise, temperature and loss variant.
inline Result check_instance(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t h,
                             std::size_t h_m, double step = 1e-5) {
  agp::Rng rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const agp::NetShape shape{d, h, h_m};
  agp::PruneNetParams p = agp::PruneNetParams::initialize(shape, rng);
  for (auto* t : p.tensors())
    for (double& v : t->flat()) v += 0.2 * u(rng);

  agp::NodeFeatures x{agp::Matrix(n + 1, d)};
  for (double& v : x.x.flat()) v = u(rng);

  std::vector<std::uint8_t> bits(n, 0);
  while (std::count(bits.begin(), bits.end(), 1) < 2)
    for (auto& b : bits) b = std::bernoulli_distribution(0.5)(rng);
  agp::Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && bits[i] && bits[j]) a(i, j) = std::bernoulli_distribution(0.7)(rng);
  const agp::WeightMatrix a_gt(a);
  const agp::NodeMask y(bits);

  const agp::LogitNoise noise = agp::sample_logit_noise(n, true, true, rng);
  const double tau = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  const bool focal = std::bernoulli_distribution(0.5)(rng);
  agp::LossWeights lw;
  lw.beta = std::uniform_real_distribution<double>(0.5, 1.5)(rng);

  agp::PruneNetParams grad = agp::PruneNetParams::zeros(shape);
  agp::loss_and_gradient(x, a_gt, y, p, noise, tau, focal, lw, &grad);

  Result r;
  auto pt = p.tensors();
  auto gt = grad.tensors();
  for (std::size_t k = 0; k < agp::PruneNetParams::kTensorCount; ++k) {
    for (std::size_t i = 0; i < pt[k]->size(); ++i) {
      double& v = pt[k]->flat()[i];
      const double orig = v;
      v = orig + step;
      const double plus = agp::loss_and_gradient(x, a_gt, y, p, noise, tau, focal, lw).total;
      v = orig - step;
      const double minus = agp::loss_and_gradient(x, a_gt, y, p, noise, tau, focal, lw).total;
      v = orig;
      const double fd = (plus - minus) / (2.0 * step);
      r.max_rel = std::max(r.max_rel, rel_error(fd, gt[k]->flat()[i]));
      ++r.checked;
    }
  }
  return r;
}

}  // namespace gradcheck

#endif  // AGP_TESTS_GRADCHECK_HPP_
