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

#include "agp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "agp/errors.hpp"
#include "parallel.hpp"

namespace agp {

namespace {

struct Cell {
  std::size_t method = 0;
  std::size_t task = 0;
  std::size_t repeat = 0;
  bool correct = false;
  bool aborted = false;
  std::int64_t tokens = 0;
  std::string error;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Sum of squared residuals with A at its closed-form optimum.
double fit_residual(std::span<const double> xs, std::span<const double> ys, double mu, double sigma,
                    double* a_out) {
  double gy = 0.0;
  double gg = 0.0;
  std::vector<double> g(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = (xs[i] - mu) / sigma;
    g[i] = std::exp(-0.5 * z * z);
    gy += g[i] * ys[i];
    gg += g[i] * g[i];
  }
  const double a = gg > 0.0 ? gy / gg : 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - a * g[i];
    r += e * e;
  }
  if (a_out) *a_out = a;
  return r;
}

template <class F>
double golden_min(F f, double lo, double hi, int iters = 60) {
  constexpr double kPhi = 0.6180339887498949;
  double c = hi - kPhi * (hi - lo);
  double d = lo + kPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kPhi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(StaticShape s) {
  switch (s) {
    case StaticShape::kChain: return "chain";
    case StaticShape::kStar: return "star";
    case StaticShape::kTree: return "tree";
    case StaticShape::kComplete: return "complete";
    case StaticShape::kRandom: return "random";
  }
  return "unknown";
}

StaticShape parse_static_shape(std::string_view s) {
  for (auto shape : {StaticShape::kChain, StaticShape::kStar, StaticShape::kTree,
                     StaticShape::kComplete, StaticShape::kRandom})
    if (to_string(shape) == s) return shape;
  throw ConfigError("unknown topology shape '" + std::string(s) +
                    "' (valid: chain, star, tree, complete, random)");
}

CommTopology make_static(StaticShape shape, std::span<const AgentId> members, std::size_t n_max,
                         Rng& rng, const StaticOptions& options) {
  const std::size_t m = members.size();
  if (m < 2) throw ConfigError("static topology needs at least 2 members");
  if (shape == StaticShape::kRandom && !(options.p >= 0.0 && options.p <= 1.0))
    throw ConfigError("random edge probability must lie in [0,1]");
  if (!std::is_sorted(members.begin(), members.end()) ||
      std::adjacent_find(members.begin(), members.end()) != members.end() ||
      members.back() >= n_max)
    throw ConfigError("static topology members must be sorted, distinct ids below n_max");

  Matrix w(n_max, n_max);
  auto link = [&](std::size_t a, std::size_t b) { w(members[a], members[b]) = 1.0; };
  switch (shape) {
    case StaticShape::kChain:
      for (std::size_t i = 0; i + 1 < m; ++i) link(i, i + 1);
      break;
    case StaticShape::kStar:
      for (std::size_t i = 1; i < m; ++i) {
        link(0, i);
        link(i, 0);
      }
      break;
    case StaticShape::kTree:
      for (std::size_t i = 1; i < m; ++i) {
        link((i - 1) / 2, i);
        if (options.bidirectional_tree) link(i, (i - 1) / 2);
      }
      break;
    case StaticShape::kComplete:
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (i != j) link(i, j);
      break;
    case StaticShape::kRandom: {
      std::bernoulli_distribution coin(options.p);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (i != j && coin(rng)) link(i, j);
      break;
    }
  }
  return CommTopology(NodeMask::from_members(members, n_max), WeightMatrix(std::move(w)));
}

const BenchRow* BenchReport::find(std::string_view method) const {
  for (const auto& r : rows)
    if (r.method == method) return &r;
  return nullptr;
}

BenchReport run_bench(std::span<const TaskSpec> suite, std::span<const BenchMethod> methods,
                      const AgentPool& pool, const BackendSet& backends,
                      const BenchOptions& options, std::string_view suite_name,
                      const std::function<void(const std::string&)>& log) {
  if (suite.empty()) throw ConfigError("bench suite is empty");
  if (methods.empty()) throw ConfigError("no bench methods given");
  if (options.repeats < 1) throw ConfigError("bench repeats must be >= 1");

  std::vector<Cell> cells;
  for (std::size_t m = 0; m < methods.size(); ++m)
    for (std::size_t t = 0; t < suite.size(); ++t)
      for (std::size_t r = 0; r < options.repeats; ++r) {
        Cell c;
        c.method = m;
        c.task = t;
        c.repeat = r;
        cells.push_back(std::move(c));
      }

  detail::parallel_for(cells.size(), options.parallelism, [&](std::size_t i) {
    Cell& c = cells[i];
    const TaskSpec& task = suite[c.task];
    const std::string stream = methods[c.method].name + "/" + task.task_id + "/" +
                               std::to_string(c.repeat);
    Rng rng(derive_seed(options.seed, stream));
    RunOptions ro = options.run;
    ro.seed = derive_seed(options.seed, stream + "/run");
    try {
      const CommTopology topo = methods[c.method].topology(task, rng);
      const RunResult res = run_topology(topo, task, pool, backends, ro);
      c.correct = check_answer(task, res.answer);
      c.tokens = res.total_tokens;
    } catch (const RunAborted& e) {
      c.aborted = true;
      c.tokens = e.partial().total_tokens;
      c.error = e.what();
    } catch (const Error& e) {
      c.aborted = true;
      c.error = e.what();
    }
  });

  BenchReport report;
  report.suite = std::string(suite_name);
  report.seed = options.seed;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    BenchRow row;
    row.method = methods[m].name;
    std::map<Category, std::pair<std::size_t, std::size_t>> per_cat;
    std::size_t correct = 0;
    for (const Cell& c : cells) {
      if (c.method != m) continue;
      ++row.runs;
      correct += c.correct;
      row.total_tokens += c.tokens;
      auto& pc = per_cat[suite[c.task].category];
      pc.first += c.correct;
      ++pc.second;
      if (c.aborted) {
        ++row.aborted;
        if (log) log(row.method + " on " + suite[c.task].task_id + ": " + c.error);
      }
    }
    row.accuracy = static_cast<double>(correct) / static_cast<double>(row.runs);
    row.mean_tokens = static_cast<double>(row.total_tokens) / static_cast<double>(row.runs);
    for (const auto& [cat, pc] : per_cat)
      row.category_accuracy[cat] = static_cast<double>(pc.first) / static_cast<double>(pc.second);
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::set<Category> report_categories(const BenchReport& report) {
  std::set<Category> cats;
  for (const auto& r : report.rows)
    for (const auto& [c, a] : r.category_accuracy) cats.insert(c);
  return cats;
}

}  // namespace

std::string bench_csv(const BenchReport& report) {
  const auto cats = report_categories(report);
  std::string out = "method,accuracy,mean_tokens,runs,aborted";
  for (Category c : cats) out += "," + std::string(to_string(c));
  out += '\n';
  for (const auto& r : report.rows) {
    out += r.method + "," + fmt("%.6f", r.accuracy) + "," + fmt("%.3f", r.mean_tokens) + "," +
           std::to_string(r.runs) + "," + std::to_string(r.aborted);
    for (Category c : cats) {
      auto it = r.category_accuracy.find(c);
      out += ",";
      if (it != r.category_accuracy.end()) out += fmt("%.6f", it->second);
    }
    out += '\n';
  }
  return out;
}

std::string bench_markdown(const BenchReport& report) {
  const auto cats = report_categories(report);
  std::string out = "| Method |";
  std::string rule = "|---|";
  for (Category c : cats) {
    out += " " + std::string(to_string(c)) + " |";
    rule += "---:|";
  }
  out += " Avg. | Tokens |\n" + rule + "---:|---:|\n";
  for (const auto& r : report.rows) {
    out += "| " + r.method + " |";
    for (Category c : cats) {
      auto it = r.category_accuracy.find(c);
      out += it != r.category_accuracy.end() ? " " + fmt("%.2f", 100.0 * it->second) + " |"
                                             : " - |";
    }
    out += " " + fmt("%.2f", 100.0 * r.accuracy) + " | " + fmt("%.1f", r.mean_tokens) + " |\n";
  }
  return out;
}

GaussianFit fit_node_count_gaussian(std::span<const std::size_t> node_counts) {
  if (node_counts.size() < 5)
    throw PreconditionError("gaussian fit needs at least 5 topologies, got " +
                            std::to_string(node_counts.size()));
  const auto [lo_it, hi_it] = std::minmax_element(node_counts.begin(), node_counts.end());
  const std::size_t lo = *lo_it;
  const std::size_t hi = *hi_it;
  if (lo == hi) throw FitDegenerate("all topologies have " + std::to_string(lo) + " active nodes");

  // Histogram over every integer in [lo, hi], empty bins included.
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t x = lo; x <= hi; ++x) {
    xs.push_back(static_cast<double>(x));
    ys.push_back(static_cast<double>(std::count(node_counts.begin(), node_counts.end(), x)));
  }

  const double span = static_cast<double>(hi - lo);
  const double mu_lo = static_cast<double>(lo) - 0.5;
  const double mu_hi = static_cast<double>(hi) + 0.5;
  const double s_lo = 0.1;
  const double s_hi = span + 1.0;
  double best_mu = xs.front();
  double best_sigma = 1.0;
  double best = fit_residual(xs, ys, best_mu, best_sigma, nullptr);
  constexpr int kGrid = 60;
  for (int i = 0; i <= kGrid; ++i) {
    const double mu = mu_lo + (mu_hi - mu_lo) * i / kGrid;
    for (int j = 0; j <= kGrid; ++j) {
      const double sigma = s_lo + (s_hi - s_lo) * j / kGrid;
      const double r = fit_residual(xs, ys, mu, sigma, nullptr);
      if (r < best) {
        best = r;
        best_mu = mu;
        best_sigma = sigma;
      }
    }
  }
  // Alternating golden-section refinement inside one grid cell.
  const double dmu = (mu_hi - mu_lo) / kGrid;
  const double dsig = (s_hi - s_lo) / kGrid;
  for (int round = 0; round < 8; ++round) {
    best_mu = golden_min(
        [&](double mu) { return fit_residual(xs, ys, mu, best_sigma, nullptr); },
        best_mu - dmu, best_mu + dmu);
    best_sigma = golden_min(
        [&](double s) { return fit_residual(xs, ys, best_mu, s, nullptr); },
        std::max(s_lo * 0.5, best_sigma - dsig), best_sigma + dsig);
  }
  GaussianFit fit;
  fit.mu = best_mu;
  fit.sigma = std::abs(best_sigma);
  fit_residual(xs, ys, fit.mu, fit.sigma, &fit.a);
  return fit;
}

GaussianFit fit_node_count_gaussian(std::span<const CommTopology> topologies) {
  std::vector<std::size_t> counts;
  counts.reserve(topologies.size());
  for (const auto& t : topologies) counts.push_back(t.mask().active_count());
  return fit_node_count_gaussian(counts);
}

}  // namespace agp
