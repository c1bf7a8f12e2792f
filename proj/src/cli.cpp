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

#include "agp/cli.hpp"

#include <cstdlib>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "agp/agent_pool.hpp"
#include "agp/bench.hpp"
#include "agp/collector.hpp"
#include "agp/embedder.hpp"
#include "agp/errors.hpp"
#include "agp/orchestrator.hpp"
#include "agp/prune_net.hpp"
#include "agp/synthetic.hpp"
#include "agp/task.hpp"
#include "json_util.hpp"

namespace agp {

namespace {

class CredentialsMissing : public Error {
 public:
  using Error::Error;
};

constexpr const char* kEnvApiKey = "AGP_API_KEY";
constexpr const char* kEnvEmbeddingEndpoint = "AGP_EMBEDDING_ENDPOINT";
constexpr const char* kEnvChatEndpoint = "AGP_CHAT_ENDPOINT";

constexpr const char* kBenchMethods[] = {"chain", "star", "tree", "complete", "random", "designed"};

class Settings {
 public:
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> file;

  bool has(const std::string& key, const char* env = nullptr) const {
    return flags.count(key) || file.count(key) || (env && env_value(env));
  }

  std::string str(const std::string& key, const std::string& def = "",
                  const char* env = nullptr) const {
    if (auto it = flags.find(key); it != flags.end()) return it->second;
    if (auto it = file.find(key); it != file.end()) return it->second;
    if (env)
      if (const char* v = env_value(env)) return v;
    return def;
  }

  std::string required(const std::string& key, const std::string& flag) const {
    std::string v = str(key);
    if (v.empty()) throw ConfigError(flag + " is required");
    return v;
  }

  template <typename T>
  T num(const std::string& key, T def) const {
    if (!has(key)) return def;
    const std::string raw = str(key);
    T v{};
    if (!CLI::detail::lexical_cast(raw, v))
      throw ConfigError("invalid value '" + raw + "' for " + key);
    return v;
  }

  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string v = str(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean '" + v + "' for " + key);
  }

  void load_file(const std::string& path) {
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::Error& e) {
      throw ConfigError("cannot read config file " + path + ": " + e.what());
    }
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--" || item.inputs.empty()) continue;
      std::string v = item.inputs.front();
      if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
        v = v.substr(1, v.size() - 2);
      file[item.fullname()] = v;
    }
  }

 private:
  static const char* env_value(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
  }
};

void option(CLI::App* app, Settings& s, const std::string& flag, const std::string& key,
            const std::string& help) {
  app->add_option_function<std::string>(
      "--" + flag, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

void switch_flag(CLI::App* app, Settings& s, const std::string& flag, const std::string& key,
                 const std::string& help) {
  app->add_flag_callback("--" + flag, [&s, key] { s.flags[key] = "true"; }, help);
}

std::uint64_t root_seed(const Settings& s) { return s.num<std::uint64_t>("global.seed", 0); }

std::size_t parallelism(const Settings& s) {
  const auto p = s.num<std::size_t>("global.parallelism", 1);
  if (p < 1) throw ConfigError("parallelism must be >= 1");
  return p;
}

AgentPool load_pool(const Settings& s) {
  const std::string path = s.str("paths.pool");
  return path.empty() ? default_pool() : load_pool_file(path);
}

std::shared_ptr<EmbeddingBackend> make_embedding(const Settings& s) {
  const std::string kind = s.str("embedding.backend", "hashing");
  const auto dim = s.num<std::size_t>("embedding.dim", kDefaultEmbeddingDim);
  if (kind == "hashing")
    return std::make_shared<MemoizedEmbedding>(std::make_shared<HashingEmbedding>(dim));
  if (kind == "http") {
    const std::string endpoint = s.str("embedding.endpoint", "", kEnvEmbeddingEndpoint);
    if (endpoint.empty()) throw ConfigError("embedding endpoint missing");
    const std::chrono::milliseconds timeout(s.num<long>("embedding.timeout_ms", 30000));
    return std::make_shared<MemoizedEmbedding>(std::make_shared<HttpEmbedding>(
        endpoint, s.str("embedding.api_key", "", kEnvApiKey), dim, timeout));
  }
  throw ConfigError("unknown embedding backend '" + kind + "' (valid: hashing, http)");
}

BackendSet make_backends(const Settings& s) {
  const std::string kind = s.str("agent.backend", "echo");
  if (kind == "echo") {
    BackendSet set;
    set.fallback = std::make_shared<EchoBackend>();
    set.decision = std::make_shared<MajorityVoteBackend>();
    return set;
  }
  if (kind == "planted") return planted_backends();
  if (kind == "http") {
    HttpChatBackend::Options o;
    o.api_key = s.str("agent.api_key", "", kEnvApiKey);
    if (o.api_key.empty()) throw CredentialsMissing("credentials missing: set AGP_API_KEY");
    o.endpoint = s.str("agent.endpoint", "", kEnvChatEndpoint);
    if (o.endpoint.empty()) throw ConfigError("chat endpoint missing");
    o.model = s.str("agent.model", "gpt-4o-mini");
    o.temperature = s.num<double>("agent.temperature", 1.0);
    o.attempts = s.num<int>("agent.attempts", 3);
    o.base_delay = std::chrono::milliseconds(s.num<long>("agent.retry_delay_ms", 1000));
    o.timeout = std::chrono::milliseconds(s.num<long>("agent.timeout_ms", 60000));
    BackendSet set;
    set.fallback = std::make_shared<HttpChatBackend>(o);
    set.decision = set.fallback;
    return set;
  }
  throw ConfigError("unknown agent backend '" + kind + "' (valid: echo, planted, http)");
}

RunOptions run_options(const Settings& s) {
  RunOptions o;
  o.k = s.num<int>("run.k", 3);
  o.theta = s.num<double>("run.theta", 0.5);
  o.seed = derive_seed(root_seed(s), "orchestrator");
  if (o.k < 1) throw ConfigError("k must be >= 1");
  return o;
}

TrainConfig train_config(const Settings& s) {
  TrainConfig c;
  c.lr = s.num("train.lr", c.lr);
  c.adam_beta1 = s.num("train.adam_beta1", c.adam_beta1);
  c.adam_beta2 = s.num("train.adam_beta2", c.adam_beta2);
  c.weight_decay = s.num("train.weight_decay", c.weight_decay);
  c.epochs = s.num("train.epochs", c.epochs);
  c.batch = s.num("train.batch", c.batch);
  c.lambda_off = s.num("train.lambda_off", c.lambda_off);
  c.lambda_s = s.num("train.lambda_s", c.lambda_s);
  c.coherence_lambda_c = s.num("train.lambda_c", c.coherence_lambda_c);
  c.objective_lambda_c = s.num("train.objective_lambda_c", c.objective_lambda_c);
  c.beta = s.num("train.beta", c.beta);
  c.tau_start = s.num("train.tau_start", c.tau_start);
  c.tau_end = s.num("train.tau_end", c.tau_end);
  c.focal_gamma = s.num("train.focal_gamma", c.focal_gamma);
  c.focal_threshold = s.num("train.focal_threshold", c.focal_threshold);
  c.gumbel_edges = s.boolean("train.gumbel_edges", c.gumbel_edges);
  c.gumbel_nodes = s.boolean("train.gumbel_nodes", c.gumbel_nodes);
  c.hidden = s.num("train.hidden", c.hidden);
  c.mask_hidden = s.num("train.mask_hidden", c.mask_hidden);
  c.seed = derive_seed(root_seed(s), "train");
  c.validate();
  return c;
}

void print_train_config(const TrainConfig& c, std::ostream& out) {
  out << "train.lr = " << c.lr << "\n"
      << "train.adam_beta1 = " << c.adam_beta1 << "\n"
      << "train.adam_beta2 = " << c.adam_beta2 << "\n"
      << "train.weight_decay = " << c.weight_decay << "\n"
      << "train.epochs = " << c.epochs << "\n"
      << "train.batch = " << c.batch << "\n"
      << "train.lambda_off = " << c.lambda_off << "\n"
      << "train.lambda_s = " << c.lambda_s << "\n"
      << "train.lambda_c = " << c.coherence_lambda_c << "\n"
      << "train.beta = " << c.beta << "\n"
      << "train.tau_start = " << c.tau_start << "\n"
      << "train.tau_end = " << c.tau_end << "\n"
      << "train.focal_gamma = " << c.focal_gamma << "\n"
      << "train.focal_threshold = " << c.focal_threshold << "\n"
      << "train.hidden = " << c.hidden << "\n"
      << "train.mask_hidden = " << c.mask_hidden << "\n"
      << "train.seed = " << c.seed << "\n";
}

Checkpoint load_checkpoint(const Settings& s, const AgentPool& pool, const EmbeddingBackend& emb) {
  const std::string path = s.required("paths.checkpoint", "--checkpoint");
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const FormatError& e) {
    throw CheckpointError(e.what());
  }
  Checkpoint ckpt = parse_checkpoint(text);
  if (ckpt.n_max != pool.n_max())
    throw CheckpointError("checkpoint was trained for " + std::to_string(ckpt.n_max) +
                          " agents, pool has " + std::to_string(pool.n_max()));
  if (ckpt.params.shape().d != emb.dim())
    throw CheckpointError("checkpoint expects " + std::to_string(ckpt.params.shape().d) +
                          "-dim features, embedding produces " + std::to_string(emb.dim()));
  return ckpt;
}

std::vector<std::string> role_labels(const AgentPool& pool) {
  std::vector<std::string> labels;
  for (const auto& a : pool.agents()) labels.push_back(a.role);
  return labels;
}

void print_roles(const CommTopology& t, const AgentPool& pool, std::ostream& os) {
  os << "active agents:";
  for (AgentId id : t.mask().active_ids()) os << " [" << id << "] " << pool[id].role << ";";
  os << "\n";
}

// ---------------------------------------------------------------------------

int cmd_synth(const Settings& s, std::ostream& out) {
  const std::string path = s.required("synth.out", "--out");
  std::array<std::size_t, kPlantedFamilies> counts{};
  if (s.has("synth.per_family")) {
    counts.fill(s.num<std::size_t>("synth.per_family", 0));
  } else {
    counts = planted_ratio_counts(s.num<std::size_t>("synth.count", 460));
  }
  const auto tasks =
      generate_planted_tasks(counts, derive_seed(root_seed(s), "synth"), s.str("synth.prefix", "p"));
  detail::write_file(path, dump_tasks(tasks));
  out << "wrote " << tasks.size() << " tasks to " << path << " (";
  for (std::size_t f = 0; f < kPlantedFamilies; ++f)
    out << (f ? ", " : "") << planted_families()[f].name << " " << counts[f];
  out << ")\n";
  return kExitOk;
}

int cmd_collect(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto tasks = load_tasks_file(s.required("collect.tasks", "--tasks"));
  if (tasks.empty()) {
    err << "no tasks\n";
    return kExitUsage;
  }
  const std::string corpus_path = s.required("paths.corpus", "--out");
  const AgentPool pool = load_pool(s);

  CollectorConfig cfg;
  cfg.budget = s.num("collector.budget", cfg.budget);
  cfg.sigma = s.num("collector.sigma", cfg.sigma);
  if (s.has("collector.mu")) cfg.mu = s.num<double>("collector.mu", 0.0);
  cfg.top_k = s.num("collector.top_k", cfg.top_k);
  cfg.seed = derive_seed(root_seed(s), "collector");
  cfg.parallelism = parallelism(s);

  const std::string kind = s.str("collector.evaluator", "orchestrator");
  std::unique_ptr<Evaluator> evaluator;
  if (kind == "planted") {
    evaluator = std::make_unique<PlantedEvaluator>();
  } else if (kind == "orchestrator") {
    evaluator = std::make_unique<OrchestratorEvaluator>(pool, make_backends(s), run_options(s));
  } else {
    throw ConfigError("unknown evaluator '" + kind + "' (valid: planted, orchestrator)");
  }

  const auto result =
      collect(tasks, pool.n_max(), *evaluator, cfg, [&](const std::string& m) { err << m << "\n"; });
  detail::write_file(corpus_path, dump_corpus(result.pairs));
  const auto& sum = result.summary;
  out << "tasks: " << sum.tasks << "\n"
      << "graphs sampled: " << sum.graphs_sampled << "\n"
      << "graphs scored: " << sum.graphs_scored << "\n"
      << "graphs skipped: " << sum.graphs_skipped << "\n"
      << "pairs mined: " << result.pairs.size() << "\n";
  for (const auto& [cat, n] : sum.pairs_per_category)
    out << "pairs " << to_string(cat) << ": " << n << "\n";
  out << "corpus: " << corpus_path << "\n";
  return kExitOk;
}

int cmd_train(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus_file(s.required("paths.corpus", "--corpus"));
  const std::string ckpt_path = s.required("paths.checkpoint", "--checkpoint");
  const std::string log_path = s.str("train.log", ckpt_path + ".log.csv");
  const TrainConfig cfg = train_config(s);
  print_train_config(cfg, out);

  const AgentPool pool = load_pool(s);
  const auto emb = make_embedding(s);
  std::size_t step_in_epoch = 0;
  const std::size_t steps_per_epoch = (corpus.size() + cfg.batch - 1) / cfg.batch;
  double epoch_sum = 0.0;
  std::size_t epoch = 0;
  const auto result = train(corpus, pool, *emb, cfg, [&](const TrainLogRow& row) {
    epoch_sum += row.total;
    if (++step_in_epoch == steps_per_epoch) {
      err << "epoch " << ++epoch << " mean loss " << epoch_sum / static_cast<double>(steps_per_epoch)
          << " tau " << row.tau << "\n";
      step_in_epoch = 0;
      epoch_sum = 0.0;
    }
  });
  detail::write_file(ckpt_path, dump_checkpoint({result.params, pool.n_max(), cfg}));
  detail::write_file(log_path, train_log_csv(result.log));
  out << "initial loss: " << result.initial_loss << "\n"
      << "final loss: " << result.final_loss << "\n"
      << "checkpoint: " << ckpt_path << "\n"
      << "log: " << log_path << "\n";
  return kExitOk;
}

int cmd_design(const Settings& s, std::ostream& out, std::ostream& err) {
  const std::string query = s.required("design.query", "--query");
  const AgentPool pool = load_pool(s);
  const auto emb = make_embedding(s);
  const Checkpoint ckpt = load_checkpoint(s, pool, *emb);
  const double theta = s.num<double>("run.theta", 0.5);
  const std::string fmt = s.str("design.format", "json");
  if (fmt != "json" && fmt != "dot") throw ConfigError("unknown format '" + fmt + "' (json, dot)");

  const CommTopology topo = design_topology(query, pool, *emb, ckpt.params, theta);
  const auto labels = role_labels(pool);
  std::string text = fmt == "dot" ? serialize_topology(topo, TopologyFormat::kDot, labels)
                                  : serialize_topology(topo, TopologyFormat::kJson);
  if (!text.empty() && text.back() != '\n') text += '\n';
  if (s.has("design.out")) {
    detail::write_file(s.str("design.out"), text);
  } else {
    out << text;
  }
  print_roles(topo, pool, err);
  return kExitOk;
}

int cmd_run(const Settings& s, std::ostream& out, std::ostream& err) {
  TaskSpec task;
  task.task_id = "query";
  task.task_text = s.required("run.query", "--query");
  task.expected_answer = s.str("run.expected");
  const std::string transcript_path = s.str("run.transcript", "transcript.json");

  const AgentPool pool = load_pool(s);
  const BackendSet backends = make_backends(s);
  const auto emb = make_embedding(s);
  const Checkpoint ckpt = load_checkpoint(s, pool, *emb);
  const RunOptions ro = run_options(s);
  const CommTopology topo = design_topology(task.task_text, pool, *emb, ckpt.params, ro.theta);
  print_roles(topo, pool, err);

  try {
    const RunResult r = run_topology(topo, task, pool, backends, ro);
    detail::write_file(transcript_path, transcript_json(r.transcript));
    if (s.has("run.out")) detail::write_file(s.str("run.out"), run_result_json(r));
    out << "answer: " << r.answer << "\n"
        << "total tokens: " << r.total_tokens << "\n"
        << "transcript: " << transcript_path << "\n";
    if (!task.expected_answer.empty())
      out << "correct: " << (check_answer(task, r.answer) ? "yes" : "no") << "\n";
  } catch (const RunAborted& e) {
    detail::write_file(transcript_path, transcript_json(e.partial().transcript));
    err << "run aborted: " << e.what() << "\npartial transcript: " << transcript_path << "\n";
    return kExitRunAborted;
  }
  return kExitOk;
}

int cmd_bench(const Settings& s, std::ostream& out, std::ostream& err) {
  const std::string suite_path = s.required("bench.suite", "--suite");
  const auto suite = load_tasks_file(suite_path);
  if (suite.empty()) {
    err << "no tasks\n";
    return kExitUsage;
  }
  const std::string default_methods =
      s.has("paths.checkpoint") ? "chain,star,tree,complete,random,designed"
                                : "chain,star,tree,complete,random";
  std::vector<std::string> names;
  {
    std::stringstream ss(s.str("bench.methods", default_methods));
    for (std::string name; std::getline(ss, name, ',');)
      if (!name.empty()) names.push_back(name);
  }
  for (const auto& name : names) {
    if (std::find(std::begin(kBenchMethods), std::end(kBenchMethods), name) ==
        std::end(kBenchMethods)) {
      err << "unknown method '" << name << "'; valid methods:";
      for (const char* m : kBenchMethods) err << " " << m;
      err << "\n";
      return kExitUsage;
    }
  }

  const AgentPool pool = load_pool(s);
  const BackendSet backends = make_backends(s);
  const auto emb = make_embedding(s);
  std::vector<AgentId> everyone(pool.n_max());
  for (AgentId i = 0; i < pool.n_max(); ++i) everyone[i] = i;
  StaticOptions so;
  so.p = s.num<double>("bench.p", so.p);
  so.bidirectional_tree = s.boolean("bench.bidirectional_tree", so.bidirectional_tree);

  std::shared_ptr<const Checkpoint> ckpt;
  std::vector<BenchMethod> methods;
  for (const auto& name : names) {
    if (name == "designed") {
      if (!ckpt) ckpt = std::make_shared<const Checkpoint>(load_checkpoint(s, pool, *emb));
      const double theta = s.num<double>("run.theta", 0.5);
      methods.push_back({name, [&pool, emb, ckpt, theta](const TaskSpec& t, Rng&) {
                           return design_topology(t.task_text, pool, *emb, ckpt->params, theta);
                         }});
    } else {
      const StaticShape shape = parse_static_shape(name);
      methods.push_back({name, [shape, &everyone, &pool, so](const TaskSpec&, Rng& rng) {
                           return make_static(shape, everyone, pool.n_max(), rng, so);
                         }});
    }
  }

  BenchOptions bo;
  bo.repeats = s.num<std::size_t>("bench.repeats", 2);
  bo.run = run_options(s);
  bo.seed = derive_seed(root_seed(s), "bench");
  bo.parallelism = emb->thread_safe() ? parallelism(s) : 1;
  const BenchReport report = run_bench(suite, methods, pool, backends, bo, suite_path,
                                       [&](const std::string& m) { err << m << "\n"; });
  const std::string csv_path = s.str("bench.csv", "bench.csv");
  const std::string md_path = s.str("bench.markdown", "bench.md");
  detail::write_file(csv_path, bench_csv(report));
  const std::string md = bench_markdown(report);
  detail::write_file(md_path, md);
  out << md << "csv: " << csv_path << "\nmarkdown: " << md_path << "\n";
  return kExitOk;
}

int cmd_export(const Settings& s, std::ostream& out) {
  bool did = false;
  if (s.has("export.pool_out")) {
    const std::string path = s.str("export.pool_out");
    detail::write_file(path, dump_pool(load_pool(s)));
    out << "pool: " << path << "\n";
    did = true;
  }
  if (s.has("export.topology")) {
    const CommTopology t = parse_topology(detail::read_file(s.str("export.topology")));
    const std::string fmt = s.str("export.format", "dot");
    if (fmt != "json" && fmt != "dot") throw ConfigError("unknown format '" + fmt + "' (json, dot)");
    std::vector<std::string> labels;
    const AgentPool pool = load_pool(s);
    if (pool.n_max() == t.n()) labels = role_labels(pool);
    std::string text = serialize_topology(
        t, fmt == "dot" ? TopologyFormat::kDot : TopologyFormat::kJson, labels);
    if (!text.empty() && text.back() != '\n') text += '\n';
    if (s.has("export.out")) {
      detail::write_file(s.str("export.out"), text);
    } else {
      out << text;
    }
    did = true;
  }
  if (!did) throw ConfigError("export needs --pool-out or --topology");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Adaptive graph pruning for multi-agent communication", "agp"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "INI config file");
  option(&app, s, "seed", "global.seed", "root seed, split per subsystem");
  option(&app, s, "parallelism", "global.parallelism", "worker threads");
  option(&app, s, "pool", "paths.pool", "agent pool JSONL (default: built-in roster)");
  option(&app, s, "embedding", "embedding.backend", "hashing | http");
  option(&app, s, "embedding-endpoint", "embedding.endpoint", "embedding service URL");
  option(&app, s, "embedding-dim", "embedding.dim", "embedding width");
  option(&app, s, "backend", "agent.backend", "echo | planted | http");
  option(&app, s, "chat-endpoint", "agent.endpoint", "chat-completions URL");
  option(&app, s, "model", "agent.model", "model tag sent to the chat endpoint");
  option(&app, s, "k", "run.k", "dialogue rounds");
  option(&app, s, "theta", "run.theta", "node and edge threshold");

  auto* synth = app.add_subcommand("synth", "write a planted task suite");
  option(synth, s, "out", "synth.out", "tasks JSONL path");
  option(synth, s, "count", "synth.count", "total tasks, split 200:100:160");
  option(synth, s, "per-family", "synth.per_family", "tasks per family (overrides --count)");
  option(synth, s, "prefix", "synth.prefix", "task id prefix");

  auto* collect_cmd = app.add_subcommand("collect", "mine supervision pairs");
  option(collect_cmd, s, "tasks", "collect.tasks", "tasks JSONL");
  option(collect_cmd, s, "out", "paths.corpus", "corpus JSONL to write");
  option(collect_cmd, s, "budget", "collector.budget", "sampled graphs per task");
  option(collect_cmd, s, "sigma", "collector.sigma", "graph-order standard deviation");
  option(collect_cmd, s, "mu", "collector.mu", "graph-order mean (default n_max/2)");
  option(collect_cmd, s, "top-k", "collector.top_k", "graphs kept per task");
  option(collect_cmd, s, "evaluator", "collector.evaluator", "orchestrator | planted");

  auto* train_cmd = app.add_subcommand("train", "train the pruning network");
  option(train_cmd, s, "corpus", "paths.corpus", "corpus JSONL");
  option(train_cmd, s, "checkpoint", "paths.checkpoint", "checkpoint to write");
  option(train_cmd, s, "log", "train.log", "training log CSV");
  for (const char* name : {"lr", "adam-beta1", "adam-beta2", "weight-decay", "epochs", "batch",
                           "lambda-off", "lambda-s", "lambda-c", "objective-lambda-c", "beta",
                           "tau-start", "tau-end", "focal-gamma", "focal-threshold",
                           "gumbel-edges", "gumbel-nodes", "hidden", "mask-hidden"}) {
    std::string key(name);
    std::replace(key.begin(), key.end(), '-', '_');
    option(train_cmd, s, name, "train." + key, "training hyperparameter");
  }

  auto* design = app.add_subcommand("design", "design a topology for a query");
  option(design, s, "checkpoint", "paths.checkpoint", "trained checkpoint");
  option(design, s, "query", "design.query", "task text");
  option(design, s, "format", "design.format", "json | dot");
  option(design, s, "out", "design.out", "output file (default stdout)");

  auto* run = app.add_subcommand("run", "design and execute a topology");
  option(run, s, "checkpoint", "paths.checkpoint", "trained checkpoint");
  option(run, s, "query", "run.query", "task text");
  option(run, s, "expected", "run.expected", "expected answer (exact match)");
  option(run, s, "transcript", "run.transcript", "transcript JSON path");
  option(run, s, "out", "run.out", "RunResult JSON path");

  auto* bench = app.add_subcommand("bench", "compare topologies on a task suite");
  option(bench, s, "suite", "bench.suite", "tasks JSONL");
  option(bench, s, "methods", "bench.methods",
         "comma list of chain, star, tree, complete, random, designed");
  option(bench, s, "checkpoint", "paths.checkpoint", "checkpoint for the designed method");
  option(bench, s, "repeats", "bench.repeats", "runs per task and method");
  option(bench, s, "p", "bench.p", "edge probability of the random baseline");
  switch_flag(bench, s, "bidirectional-tree", "bench.bidirectional_tree",
              "tree edges in both directions");
  option(bench, s, "csv", "bench.csv", "CSV report path");
  option(bench, s, "markdown", "bench.markdown", "markdown report path");

  auto* exp = app.add_subcommand("export", "export the pool or convert a topology");
  option(exp, s, "pool-out", "export.pool_out", "write the pool as JSONL");
  option(exp, s, "topology", "export.topology", "topology JSON to convert");
  option(exp, s, "format", "export.format", "dot | json");
  option(exp, s, "out", "export.out", "output file (default stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (!config_path.empty()) s.load_file(config_path);
    if (synth->parsed()) return cmd_synth(s, out);
    if (collect_cmd->parsed()) return cmd_collect(s, out, err);
    if (train_cmd->parsed()) return cmd_train(s, out, err);
    if (design->parsed()) return cmd_design(s, out, err);
    if (run->parsed()) return cmd_run(s, out, err);
    if (bench->parsed()) return cmd_bench(s, out, err);
    if (exp->parsed()) return cmd_export(s, out);
  } catch (const CredentialsMissing& e) {
    err << e.what() << "\n";
    return kExitExternal;
  } catch (const EmbeddingUnavailable& e) {
    err << "embedding service: " << e.what() << "\n";
    return kExitExternal;
  } catch (const BackendError& e) {
    err << "agent backend: " << e.what() << "\n";
    return kExitExternal;
  } catch (const ScoreUnavailable& e) {
    err << "evaluator: " << e.what() << "\n";
    return kExitExternal;
  } catch (const TrainingDiverged& e) {
    err << "training diverged at step " << e.step() << ": " << e.what() << "\n";
    return kExitTraining;
  } catch (const CheckpointError& e) {
    err << "checkpoint: " << e.what() << "\n";
    return kExitCheckpoint;
  } catch (const RunAborted& e) {
    err << "run aborted: " << e.what() << "\n";
    return kExitRunAborted;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace agp
