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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// and exits nonzero when any criterion fails.
//
// usage: agp_acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "agp/bench.hpp"
#include "agp/collector.hpp"
#include "agp/orchestrator.hpp"
#include "agp/prune_net.hpp"
#include "agp/synthetic.hpp"
#include "gradcheck.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace agp;
using testutil::cli;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

testutil::fs::path g_work;

// Shared between criteria 5, 6 and 8.
std::string g_checkpoint;
std::string g_heldout;

Outcome gradient_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = gradcheck::check_instance(seed, 5, 8, 6, 4);
    worst = std::max(worst, r.max_rel);
    checked += r.checked;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 10.0,
          "20 instances, " + std::to_string(checked) + " partials, max rel err " +
              fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome loss_hand_cases() {
  Matrix w(3, 3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) w(i, i) = 0.0;
  Matrix a(3, 3);
  a(0, 1) = 1.0;
  const double edge =
      edge_loss(w, WeightMatrix(a), NodeMask(std::vector<std::uint8_t>{1, 1, 0}), 0.5);

  Matrix w2(2, 2);
  w2(1, 0) = 0.8;
  const std::vector<double> y_hat = {0.5, 0.5};
  const double node =
      node_loss(y_hat, NodeMask(std::vector<std::uint8_t>{1, 0}), w2, 0.1, 0.05, false);
  // BCE ln 2, sparsity 0.1 * 0.5, coherence 0.05 * 0.8 / 4.
  const double node_want = std::log(2.0) + 0.05 + 0.01;
  const double total = total_loss(edge, node, 1.0);

  const bool ok = std::abs(edge - 0.375) < 1e-9 && std::abs(node - node_want) < 1e-9 &&
                  std::abs(total - (0.375 + node_want)) < 1e-9 &&
                  std::abs(node - 0.7531) < 5e-5 && std::abs(total - 1.1281) < 5e-5;
  return {ok, "edge " + fmt("%.12f", edge) + ", node " + fmt("%.12f", node) + ", total " +
                  fmt("%.12f", total)};
}

Outcome lifting_round_trip() {
  std::mt19937_64 rng(2026);
  std::size_t ok = 0;
  std::size_t pairs_valid = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n_max = 2 + rng() % 15;
    std::vector<AgentId> ids(n_max);
    std::iota(ids.begin(), ids.end(), AgentId{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(2 + rng() % (n_max - 1));
    std::sort(ids.begin(), ids.end());
    const std::size_t m = ids.size();
    std::vector<std::uint8_t> adj(m * m, 0);
    std::vector<std::vector<int>> grid(m, std::vector<int>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && rng() % 2) adj[i * m + j] = grid[i][j] = 1;
    const Topology sub(m, adj);
    auto [w, mask] = lift_subgraph(sub, ids, n_max);

    const auto want = oracle::lift(grid, ids, n_max);
    bool same = restrict_to(w, ids) == sub && mask.active_ids() == ids;
    for (std::size_t i = 0; i < n_max; ++i)
      for (std::size_t j = 0; j < n_max; ++j) same &= w(i, j) == want[i][j];
    ok += same;

    // Mine the same member set as a scored graph and validate the pair.
    TaskScores ts{TaskSpec{"t", "x", Category::kMathReasoning, "", AnswerCheck::kExact, 1e-6},
                  {{{ids, sub}, 1.0}}};
    CollectorConfig cfg;
    cfg.top_k = 1;
    try {
      for (const auto& p : mine_supervision(std::span(&ts, 1), cfg, n_max)) {
        validate(p);
        ++pairs_valid;
      }
    } catch (const Error&) {
    }
  }
  return {ok == 1000 && pairs_valid == 1000,
          std::to_string(ok) + "/1000 round-trips exact, " + std::to_string(pairs_valid) +
              "/1000 mined pairs valid"};
}

Outcome collector_distribution() {
  const auto t0 = Clock::now();
  CollectorConfig cfg;
  cfg.budget = 2000;
  cfg.sigma = 2.0;
  double ks = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    ks += oracle::ks_orders(sample_orders(cfg, 16), 8.0, 2.0, 16);
  }
  ks /= 5.0;
  const double secs = seconds_since(t0);
  return {ks < 0.05 && secs < 5.0,
          "mean KS " + fmt("%.4f", ks) + " over 5 seeds, " + fmt("%.3f", secs) + " s"};
}

Outcome planted_recovery() {
  const auto t0 = Clock::now();
  const std::string tasks = (g_work / "planted_tasks.jsonl").string();
  const std::string corpus = (g_work / "planted_corpus.jsonl").string();
  g_checkpoint = (g_work / "planted_net.json").string();
  g_heldout = (g_work / "heldout_tasks.jsonl").string();

  auto step = [](const std::vector<std::string>& args) {
    const auto r = cli(args);
    if (r.code != 0)
      std::fprintf(stderr, "agp %s failed (%d): %s\n", args[0].c_str(), r.code, r.err.c_str());
    return r.code == 0;
  };
  if (!step({"synth", "--out", tasks, "--count", "2300", "--seed", "1"}) ||
      !step({"collect", "--tasks", tasks, "--out", corpus, "--evaluator", "planted", "--budget",
             "300", "--seed", "1"}) ||
      !step({"train", "--corpus", corpus, "--checkpoint", g_checkpoint, "--seed", "1"}) ||
      !step({"synth", "--out", g_heldout, "--per-family", "10", "--prefix", "held", "--seed",
             "99"}))
    return {false, "pipeline command failed"};

  std::size_t exact = 0;
  const auto held = load_tasks_file(g_heldout);
  for (const auto& t : held) {
    const auto r = cli({"design", "--checkpoint", g_checkpoint, "--query", t.task_text});
    if (r.code != 0) return {false, "design failed: " + r.err};
    const CommTopology topo = parse_topology(r.out);
    exact += topo.mask() == planted_mask(classify_family(t.task_text), 15);
  }
  const double secs = seconds_since(t0);
  return {held.size() == 30 && exact >= 27 && secs < 300.0,
          std::to_string(exact) + "/" + std::to_string(held.size()) +
              " held-out queries recover the planted team exactly, " + fmt("%.1f", secs) + " s"};
}

Outcome token_economy() {
  if (g_checkpoint.empty()) return {false, "no checkpoint from the planted pipeline"};
  const std::string csv = (g_work / "bench.csv").string();
  const auto r = cli({"bench", "--suite", g_heldout, "--methods", "designed,complete",
                      "--checkpoint", g_checkpoint, "--backend", "planted", "--csv", csv,
                      "--markdown", (g_work / "bench.md").string(), "--seed", "1"});
  if (r.code != 0) return {false, "bench failed: " + r.err};
  std::map<std::string, std::pair<double, double>> rows;  // accuracy, tokens
  std::istringstream in(testutil::slurp(csv));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name, acc, tok;
    std::getline(ls, name, ',');
    std::getline(ls, acc, ',');
    std::getline(ls, tok, ',');
    rows[name] = {std::stod(acc), std::stod(tok)};
  }
  if (!rows.count("designed") || !rows.count("complete")) return {false, "bench rows missing"};
  const auto [acc_d, tok_d] = rows["designed"];
  const auto [acc_c, tok_c] = rows["complete"];
  const double ratio = tok_d / tok_c;
  return {ratio <= 0.40 && acc_d >= acc_c,
          "designed tokens " + fmt("%.1f", tok_d) + " vs complete " + fmt("%.1f", tok_c) +
              " (" + fmt("%.1f", 100.0 * ratio) + "%), accuracy " + fmt("%.3f", acc_d) + " vs " +
              fmt("%.3f", acc_c)};
}

Outcome orchestrator_counting() {
  BackendSet echo_set;
  echo_set.fallback = std::make_shared<EchoBackend>();
  echo_set.decision = std::make_shared<MajorityVoteBackend>();
  const BackendSet& echo = echo_set;
  const BackendSet planted = planted_backends();
  const auto task = generate_planted_tasks({1, 1, 1}, 5);
  std::mt19937_64 rng(7);
  std::size_t count_ok = 0, det_ok = 0, runs = 0;
  for (std::size_t m = 2; m <= 15; ++m) {
    std::vector<AgentId> ids(15);
    std::iota(ids.begin(), ids.end(), AgentId{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(m);
    std::sort(ids.begin(), ids.end());
    auto [w, mask] = lift_subgraph(Topology::complete(m), ids, 15);
    const CommTopology t(mask, w);
    for (const BackendSet* b : {&echo, &planted}) {
      const RunOptions opts{3, 0.5, 1000 + m};
      const auto a = run_topology(t, task[m % 3], default_pool(), *b, opts);
      const auto again = run_topology(t, task[m % 3], default_pool(), *b, opts);
      count_ok += a.transcript.size() == 3 * m + 1;
      det_ok += run_result_json(a) == run_result_json(again);
      ++runs;
    }
  }
  // The same through the command line.
  const std::string o1 = (g_work / "run1.json").string(), o2 = (g_work / "run2.json").string();
  bool cli_ok = !g_checkpoint.empty();
  if (cli_ok) {
    for (const auto& out : {o1, o2})
      cli_ok &= cli({"run", "--checkpoint", g_checkpoint, "--query", task[0].task_text, "--backend",
                     "planted", "--seed", "4", "--out", out, "--transcript",
                     (g_work / "transcript.json").string()})
                    .code == 0;
    cli_ok &= testutil::slurp(o1) == testutil::slurp(o2) && !testutil::slurp(o1).empty();
  }
  return {count_ok == runs && det_ok == runs && cli_ok,
          std::to_string(count_ok) + "/" + std::to_string(runs) + " runs with 3m+1 entries, " +
              std::to_string(det_ok) + "/" + std::to_string(runs) +
              " byte-identical replays, cli replay " + (cli_ok ? "identical" : "differs")};
}

Outcome beta_sweep() {
  const std::string tasks = (g_work / "sweep_tasks.jsonl").string();
  const std::string corpus = (g_work / "sweep_corpus.jsonl").string();
  if (cli({"synth", "--out", tasks, "--count", "460", "--seed", "8"}).code != 0 ||
      cli({"collect", "--tasks", tasks, "--out", corpus, "--evaluator", "planted", "--budget", "300",
           "--seed", "8"})
              .code != 0)
    return {false, "could not build the sweep corpus"};
  std::vector<std::string> logs;
  std::string detail;
  bool ok = true;
  // Flag value and how the effective config prints it.
  const std::pair<const char*, const char*> betas[] = {{"0.75", "0.75"}, {"1.0", "1"},
                                                       {"1.333", "1.333"}};
  for (const auto& [beta, shown] : betas) {
    const std::string ckpt = (g_work / (std::string("sweep_") + beta + ".json")).string();
    const auto r = cli({"train", "--corpus", corpus, "--checkpoint", ckpt, "--beta", beta,
                        "--seed", "8"});
    ok &= r.code == 0 && r.out.find(std::string("train.beta = ") + shown) != std::string::npos;
    logs.push_back(testutil::slurp(ckpt + ".log.csv"));
    const auto pos = r.out.find("final loss: ");
    const std::string final_loss =
        pos == std::string::npos ? "?" : r.out.substr(pos + 12, r.out.find('\n', pos) - pos - 12);
    detail += std::string(detail.empty() ? "" : ", ") + "beta " + beta + " final " + final_loss;
  }
  const bool distinct = logs[0] != logs[1] && logs[1] != logs[2] && logs[0] != logs[2];
  ok &= distinct && !logs[0].empty();
  return {ok, detail + (distinct ? ", trajectories distinct" : ", trajectories NOT distinct")};
}

Outcome gaussian_fit() {
  std::mt19937_64 rng(500);
  std::normal_distribution<double> g(8.0, 1.3);
  std::vector<std::size_t> counts;
  while (counts.size() < 500) {
    const double x = std::round(g(rng));
    if (x >= 1.0) counts.push_back(static_cast<std::size_t>(x));
  }
  const GaussianFit fit = fit_node_count_gaussian(counts);
  return {std::abs(fit.mu - 8.0) <= 0.5 && fit.sigma >= 1.0 && fit.sigma <= 1.6,
          "A " + fmt("%.2f", fit.a) + ", mu " + fmt("%.3f", fit.mu) + ", sigma " +
              fmt("%.3f", fit.sigma)};
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? testutil::fs::path(argv[1]) : testutil::scratch_dir("acceptance");
  testutil::fs::remove_all(g_work);
  testutil::fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient oracle", gradient_oracle},
      {"loss hand cases", loss_hand_cases},
      {"lifting round-trip", lifting_round_trip},
      {"collector order distribution", collector_distribution},
      {"planted recovery end-to-end", planted_recovery},
      {"token economy vs complete graph", token_economy},
      {"orchestrator counting and determinism", orchestrator_counting},
      {"beta sweep", beta_sweep},
      {"gaussian fit recovery", gaussian_fit},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu [%s] %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
