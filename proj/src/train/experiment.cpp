// Copyright 2026 The Treesum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "treesum/train/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "treesum/error.hpp"
#include "treesum/nn/rng.hpp"
#include "treesum/sim/cluster.hpp"

namespace treesum::train {

using nlohmann::json;

double scale_lr(double base_lr, double base_batch, double new_batch) {
  if (!(base_lr > 0.0) || !(base_batch > 0.0) || !(new_batch > 0.0)) {
    throw std::invalid_argument("scale_lr: all arguments must be positive");
  }
  return base_lr * (new_batch / base_batch);
}

namespace {

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::kNinGaussian: return "nin-gaussian";
    case InitKind::kXavier: return "xavier";
    case InitKind::kGaussian: return "gaussian";
  }
  return "?";
}

InitKind parse_init(std::string_view s) {
  if (s == "nin-gaussian") return InitKind::kNinGaussian;
  if (s == "xavier") return InitKind::kXavier;
  if (s == "gaussian") return InitKind::kGaussian;
  throw ConfigError("config field 'init': unknown scheme '" + std::string(s) +
                    "' (expected xavier, nin-gaussian or gaussian)");
}

class Reader {
 public:
  Reader(const json& j, std::string where, std::set<std::string> allowed) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": must be an object");
    for (const auto& [key, value] : j_.items()) {
      if (!allowed.contains(key)) throw ConfigError(where_ + ": unknown field '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ConfigError(where_ + " field '" + field + "': " + what);
  }

  bool has(const char* f) const { return j_.contains(f); }
  const json& at(const char* f) const { return j_.at(f); }

  void count(const char* f, std::size_t& out) const {
    if (!has(f)) return;
    if (!j_[f].is_number_unsigned()) fail(f, "must be a non-negative integer");
    out = j_[f].get<std::size_t>();
  }
  void seed(const char* f, std::uint64_t& out) const {
    if (!has(f)) return;
    if (!j_[f].is_number_unsigned()) fail(f, "must be a non-negative integer");
    out = j_[f].get<std::uint64_t>();
  }
  void number(const char* f, double& out) const {
    if (!has(f)) return;
    if (!j_[f].is_number()) fail(f, "must be a number");
    out = j_[f].get<double>();
  }
  void text(const char* f, std::string& out) const {
    if (!has(f)) return;
    if (!j_[f].is_string()) fail(f, "must be a string");
    out = j_[f].get<std::string>();
  }

 private:
  const json& j_;
  std::string where_;
};

std::size_t planned_iterations(const ExperimentConfig& c) {
  return comm::iterations_for_epochs(c.hyper.epochs, c.dataset.train, c.hyper.batch_size);
}

nn::LrSchedule effective_schedule(const ExperimentConfig& c) {
  nn::LrSchedule s = c.hyper.lr_schedule;
  if (s.kind == nn::LrPolicy::kPolynomial && s.max_iter == 0) s.max_iter = planned_iterations(c);
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (arch != "toy-nin" && arch != "toy-fc") {
    throw ConfigError("config field 'arch': unknown executable architecture '" + arch +
                      "' (expected toy-nin or toy-fc)");
  }
  if (dataset.train == 0 || dataset.test == 0) throw ConfigError("config field 'dataset': train and test must be >= 1");
  if (dataset.classes < 2) throw ConfigError("config field 'dataset.classes': must be >= 2");
  if (dataset.train < dataset.classes) throw ConfigError("config field 'dataset.train': fewer items than classes");
  if (arch == "toy-nin" && (dataset.dims.height % 4 != 0 || dataset.dims.width % 4 != 0 ||
                            dataset.dims.height == 0 || dataset.dims.width == 0)) {
    throw ConfigError("config field 'dataset': toy-nin needs height and width divisible by 4");
  }
  if (workers == 0) throw ConfigError("config field 'workers': must be >= 1");
  if (hyper.batch_size % workers != 0) {
    throw ConfigError("config: batch_size " + std::to_string(hyper.batch_size) + " is not divisible by " +
                      std::to_string(workers) + " workers");
  }
  if (topology.kind == comm::TopologyKind::kSingle && workers != 1) {
    throw ConfigError("config: topology 'single' requires workers = 1");
  }
  if (eval_interval == 0) throw ConfigError("config field 'eval_interval': must be >= 1");
  if (init == InitKind::kGaussian && !(init_std > 0.0)) throw ConfigError("config field 'init_std': must be > 0");
  try {
    topology.validate();
    hardware.validate();
    nn::Hyperparams h = hyper;
    h.lr_schedule = effective_schedule(*this);
    h.validate();
    if (h.lr_schedule.kind == nn::LrPolicy::kPolynomial && h.lr_schedule.max_iter < planned_iterations(*this)) {
      throw std::invalid_argument("lr schedule: polynomial max_iter is shorter than the run");
    }
    for (double lr : lrs) {
      if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("lrs entries must be positive");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_experiment_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("experiment config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  const Reader r(doc, "config",
                 {"arch", "seed", "dataset", "batch_size", "epochs", "momentum", "weight_decay", "lr", "init",
                  "init_std", "topology", "workers", "hardware", "eval_interval", "lrs", "output"});
  r.text("arch", c.arch);
  r.seed("seed", c.hyper.seed);
  if (r.has("dataset")) {
    const Reader d(r.at("dataset"), "config.dataset",
                   {"seed", "train", "test", "channels", "height", "width", "classes"});
    if (d.has("seed")) {
      std::uint64_t s = 0;
      d.seed("seed", s);
      c.dataset.seed = s;
    }
    d.count("train", c.dataset.train);
    d.count("test", c.dataset.test);
    d.count("channels", c.dataset.dims.channels);
    d.count("height", c.dataset.dims.height);
    d.count("width", c.dataset.dims.width);
    d.count("classes", c.dataset.classes);
  }
  r.count("batch_size", c.hyper.batch_size);
  r.count("epochs", c.hyper.epochs);
  r.number("momentum", c.hyper.momentum);
  r.number("weight_decay", c.hyper.weight_decay);
  if (r.has("lr")) {
    const Reader l(r.at("lr"), "config.lr", {"policy", "base_lr", "gamma", "steps", "power", "max_iter"});
    auto& s = c.hyper.lr_schedule;
    if (l.has("policy")) {
      std::string p;
      l.text("policy", p);
      try {
        s.kind = nn::parse_lr_policy(p);
      } catch (const std::invalid_argument& e) {
        l.fail("policy", e.what());
      }
    }
    l.number("base_lr", s.base_lr);
    l.number("gamma", s.gamma);
    l.number("power", s.power);
    l.count("max_iter", s.max_iter);
    if (l.has("steps")) {
      const json& steps = l.at("steps");
      if (!steps.is_array()) l.fail("steps", "must be a list of iterations");
      s.step_iters.clear();
      for (const auto& v : steps) {
        if (!v.is_number_unsigned()) l.fail("steps", "entries must be non-negative integers");
        s.step_iters.push_back(v.get<std::size_t>());
      }
    }
  }
  if (r.has("init")) {
    std::string s;
    r.text("init", s);
    c.init = parse_init(s);
  }
  r.number("init_std", c.init_std);
  if (r.has("topology")) {
    std::string t;
    r.text("topology", t);
    c.topology = comm::parse_topology(t);
  }
  r.count("workers", c.workers);
  if (r.has("hardware")) {
    const Reader h(r.at("hardware"), "config.hardware", {"bandwidth", "latency", "worker_flops"});
    h.number("bandwidth", c.hardware.bandwidth);
    h.number("latency", c.hardware.latency);
    h.number("worker_flops", c.hardware.worker_flops);
  }
  r.count("eval_interval", c.eval_interval);
  if (r.has("lrs")) {
    const json& lrs = r.at("lrs");
    if (!lrs.is_array() || lrs.empty()) r.fail("lrs", "must be a non-empty list of learning rates");
    for (const auto& v : lrs) {
      if (!v.is_number()) r.fail("lrs", "entries must be numbers");
      c.lrs.push_back(v.get<double>());
    }
  }
  r.text("output", c.output);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_experiment_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_experiment_config(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["arch"] = c.arch;
  j["seed"] = c.hyper.seed;
  nlohmann::ordered_json d;
  if (c.dataset.seed) d["seed"] = *c.dataset.seed;
  d["train"] = c.dataset.train;
  d["test"] = c.dataset.test;
  d["channels"] = c.dataset.dims.channels;
  d["height"] = c.dataset.dims.height;
  d["width"] = c.dataset.dims.width;
  d["classes"] = c.dataset.classes;
  j["dataset"] = d;
  j["batch_size"] = c.hyper.batch_size;
  j["epochs"] = c.hyper.epochs;
  j["momentum"] = c.hyper.momentum;
  j["weight_decay"] = c.hyper.weight_decay;
  const auto& s = c.hyper.lr_schedule;
  nlohmann::ordered_json l;
  l["policy"] = std::string(nn::to_string(s.kind));
  l["base_lr"] = s.base_lr;
  l["gamma"] = s.gamma;
  l["steps"] = s.step_iters;
  l["power"] = s.power;
  l["max_iter"] = s.max_iter;
  j["lr"] = l;
  j["init"] = std::string(to_string(c.init));
  j["init_std"] = c.init_std;
  j["topology"] = comm::to_string(c.topology);
  j["workers"] = c.workers;
  j["hardware"] = {{"bandwidth", c.hardware.bandwidth},
                   {"latency", c.hardware.latency},
                   {"worker_flops", c.hardware.worker_flops}};
  j["eval_interval"] = c.eval_interval;
  if (!c.lrs.empty()) j["lrs"] = c.lrs;
  if (!c.output.empty()) j["output"] = c.output;
  return j.dump(2) + "\n";
}

nn::Network build_network(const ExperimentConfig& c) {
  const std::size_t ch = c.dataset.dims.channels, h = c.dataset.dims.height, w = c.dataset.dims.width;
  const std::size_t k = c.dataset.classes;
  if (c.arch == "toy-fc") {
    return nn::Network({ch, h, w}, {nn::fully_connected(ch, 64, h, w), nn::relu(), nn::fully_connected(64, k),
                                    nn::softmax_xent()});
  }
  if (c.arch != "toy-nin") throw ConfigError("unknown executable architecture '" + c.arch + "'");
  nn::LayerSpec head = nn::convolution(16, k, 1);
  head.filter_h = h / 4;
  head.filter_w = w / 4;
  return nn::Network({ch, h, w}, {nn::convolution(ch, 8, 3, 1, 1), nn::relu(), nn::convolution(8, 8, 1),
                                  nn::relu(), nn::max_pool(2, 2), nn::convolution(8, 16, 3, 1, 1), nn::relu(),
                                  nn::convolution(16, 16, 1), nn::relu(), nn::max_pool(2, 2), head,
                                  nn::softmax_xent()});
}

DatasetSplit make_dataset(const ExperimentConfig& c) {
  const std::uint64_t seed = c.dataset.seed ? *c.dataset.seed : nn::derive_stream(c.hyper.seed, 1u << 20);
  return make_synthetic_split(seed, c.dataset.train, c.dataset.test, c.dataset.dims, c.dataset.classes);
}

std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, make_dataset(config));
}

RunResult run_experiment(const ExperimentConfig& config, const DatasetSplit& data) {
  config.validate();
  if (data.train.size() != config.dataset.train) throw ConfigError("dataset does not match the configuration");
  nn::Network net = build_network(config);
  switch (config.init) {
    case InitKind::kNinGaussian: net.initialize(nn::nin_gaussian_policy, config.hyper.seed); break;
    case InitKind::kXavier: net.initialize(nn::InitScheme::xavier(), config.hyper.seed); break;
    case InitKind::kGaussian: net.initialize(nn::InitScheme::gaussian(config.init_std), config.hyper.seed); break;
  }
  nn::Hyperparams hyper = config.hyper;
  hyper.lr_schedule = effective_schedule(config);

  RunResult out;
  out.base_lr = hyper.lr_schedule.base_lr;
  out.iterations_planned = planned_iterations(config);
  auto workers = sim::make_workers(net, config.workers);
  const sim::CommPlan plan = sim::plan_topology(config.topology, config.workers);
  sim::validate_plan(plan);

  const std::size_t batch = hyper.batch_size;
  const double n_train = static_cast<double>(data.train.size());
  nn::Tensor x;
  std::vector<std::size_t> y;
  double clock = 0.0;
  for (std::size_t it = 0; it < out.iterations_planned; ++it) {
    data.train.batch(it * batch, batch, x, y);
    const auto res = sim::run_distributed_iteration(workers, sim::split_batch(x, y, config.workers), plan,
                                                    config.hardware, hyper, it);
    ++out.comm_events;
    clock += res.clock.total_seconds();
    MetricsRow row;
    row.iter = it;
    row.epoch = static_cast<double>((it + 1) * batch) / n_train;
    row.lr = nn::lr_at(hyper.lr_schedule, it);
    row.train_loss = res.loss;
    row.comm_s = res.clock.comm_seconds;
    row.total_s = res.clock.total_seconds();
    row.wall_s = clock;
    if (!std::isfinite(res.loss)) {
      out.diverged = true;
      out.diverged_at = it;
      out.rows.push_back(row);
      break;
    }
    if ((it + 1) % config.eval_interval == 0 || it + 1 == out.iterations_planned) {
      row.test_acc = workers[0].replica.accuracy(data.test.inputs, data.test.labels);
      out.final_test_acc = *row.test_acc;
    }
    out.rows.push_back(row);
  }
  out.weights_digest = hex64(fnv1a64(workers[0].replica.weight_bytes()));
  out.final_weights = workers[0].replica.flat_weights();
  return out;
}

std::vector<RunResult> run_sweep(const ExperimentConfig& config, std::size_t parallel) {
  if (config.lrs.empty()) throw ConfigError("sweep: no learning rates given");
  config.validate();
  const DatasetSplit data = make_dataset(config);
  std::vector<RunResult> results(config.lrs.size());
  std::vector<std::exception_ptr> errors(config.lrs.size());
  auto run_one = [&](std::size_t i) {
    try {
      ExperimentConfig c = config;
      c.lrs.clear();
      c.hyper.lr_schedule.base_lr = config.lrs[i];
      results[i] = run_experiment(c, data);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallel, config.lrs.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < config.lrs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < config.lrs.size(); i = next++) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

DivergenceReport compare_metrics(const std::vector<MetricsRow>& a, const std::vector<MetricsRow>& b) {
  DivergenceReport r;
  r.compared_rows = std::min(a.size(), b.size());
  r.length_mismatch = a.size() != b.size();
  for (std::size_t i = 0; i < r.compared_rows; ++i) {
    const double d = std::abs(a[i].train_loss - b[i].train_loss);
    r.max_abs_loss_diff = std::max(r.max_abs_loss_diff, d);
    const double scale = std::max(std::abs(a[i].train_loss), std::abs(b[i].train_loss));
    if (scale > 0.0) r.max_rel_loss_diff = std::max(r.max_rel_loss_diff, d / scale);
  }
  auto last_acc = [](const std::vector<MetricsRow>& rows) {
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      if (it->test_acc) return *it->test_acc;
    }
    return 0.0;
  };
  r.final_acc_delta = last_acc(b) - last_acc(a);
  return r;
}

DivergenceReport compare_runs(const RunResult& a, const RunResult& b) {
  DivergenceReport r = compare_metrics(a.rows, b.rows);
  r.digests_equal = a.weights_digest == b.weights_digest;
  return r;
}

}  // namespace treesum::train
