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


#include "treesum/cli/cli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "treesum/arch/analysis.hpp"
#include "treesum/arch/architecture.hpp"
#include "treesum/comm/model.hpp"
#include "treesum/error.hpp"
#include "treesum/format.hpp"
#include "treesum/sim/allreduce.hpp"
#include "treesum/sim/exact_sum.hpp"
#include "treesum/sim/plan.hpp"
#include "treesum/sim/timing.hpp"
#include "treesum/train/experiment.hpp"
#include "treesum/train/metrics.hpp"

namespace treesum::cli {

namespace {

constexpr double kMB = 1e6;
constexpr std::size_t kCheckValues = 257;

/// Raised for flag values that parse but make no sense; reported like a
/// CLI11 parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::uint64_t parse_count(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("'" + s + "' is not a non-negative integer");
  }
  return v;
}

// ---- shared pieces ----------------------------------------------------------

struct LinkOptions {
  std::optional<double> grad_mb;
  std::optional<std::string> arch;
  std::uint64_t batch = 1024;
  double bw_gbps = 1.0;
  double latency_us = 0.0;
  double worker_tflops = 1.0;
  std::string p_list = "2,4,...,128";
  std::string topo = "all";
  std::uint64_t k = 2;
  bool csv = false;
  bool payload_check = false;
};

void add_link_options(CLI::App* cmd, LinkOptions& o, bool simulate) {
  auto* grad = cmd->add_option("--grad-mb", o.grad_mb, "Gradient size in MB (1e6 bytes)");
  auto* arch = cmd->add_option("--arch", o.arch, "Bundled architecture name or JSON path; gradient = |W|");
  grad->excludes(arch);
  cmd->add_option("--batch", o.batch, "Global batch for compute time with --arch")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bw-gbps", o.bw_gbps, "Per-node bandwidth in GB/s (1e9 bytes/s)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--latency-us", o.latency_us, "Per-hop latency in microseconds")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--worker-tflops", o.worker_tflops, "Per-worker compute in TFLOP/s")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--p", o.p_list, "Worker counts, e.g. 4,8,...,128 or 2,3,4")->capture_default_str();
  cmd->add_option("--topo", o.topo, "Topology: ps, tree or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"ps", "tree", "all"}));
  cmd->add_option("--k", o.k, "Tree branching factor")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  if (simulate) {
    cmd->add_flag("--payload-check", o.payload_check,
                  "Also run an exact allreduce through each plan and verify every rank's result");
  }
  cmd->add_flag("--csv", o.csv, "Machine-readable CSV instead of a table");
}

struct Workload {
  double gradient_bytes = 0.0;
  std::optional<double> flops;  // forward + backward per global batch
  std::uint64_t batch = 0;
};

Workload resolve_workload(const LinkOptions& o) {
  if (!o.grad_mb && !o.arch) throw UsageError("one of --grad-mb or --arch is required");
  Workload w;
  if (o.grad_mb) {
    if (!(*o.grad_mb >= 0.0) || !std::isfinite(*o.grad_mb)) throw UsageError("--grad-mb must be >= 0");
    w.gradient_bytes = *o.grad_mb * kMB;
    return w;
  }
  const arch::ArchitectureSpec spec = arch::resolve_architecture(*o.arch);
  w.gradient_bytes = static_cast<double>(arch::weight_bytes(spec));
  w.flops = arch::flops_per_batch(spec, o.batch);
  w.batch = o.batch;
  return w;
}

comm::HardwareModel hardware(const LinkOptions& o) {
  comm::HardwareModel hw;
  hw.bandwidth = o.bw_gbps * 1e9;
  hw.latency = o.latency_us * 1e-6;
  hw.worker_flops = o.worker_tflops * 1e12;
  hw.validate();
  return hw;
}

std::vector<comm::Topology> topologies(const LinkOptions& o) {
  std::vector<comm::Topology> t;
  if (o.topo == "ps" || o.topo == "all") t.push_back(comm::Topology::parameter_server());
  if (o.topo == "tree" || o.topo == "all") t.push_back(comm::Topology::tree(o.k));
  return t;
}

std::vector<std::uint64_t> p_values(const LinkOptions& o) {
  try {
    return parse_p_list(o.p_list);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--p: ") + e.what());
  }
}

std::string topo_label(const comm::Topology& t) {
  return t.kind == comm::TopologyKind::kParameterServer ? "ps" : "tree:" + std::to_string(t.k);
}

// Simple right-aligned text table.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void print(std::ostream& out) const {
    std::vector<std::size_t> w(rows_[0].size(), 0);
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    }
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i == 0) {
          out << std::left << std::setw(static_cast<int>(w[i])) << r[i];
        } else {
          out << "  " << std::right << std::setw(static_cast<int>(w[i])) << r[i];
        }
      }
      out << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

void print_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

// ---- analyze ------------------------------------------------------------------

struct AnalyzeOptions {
  std::vector<std::string> arch{"all"};
  std::uint64_t batch = 1024;
  bool csv = false;
};

int run_analyze(const AnalyzeOptions& o, std::ostream& out) {
  std::vector<arch::SizeReport> reports;
  for (const auto& name : o.arch) {
    if (name == "all") {
      for (const auto& b : arch::bundled_architectures()) reports.push_back(arch::analyze(arch::bundled_architecture(b), o.batch));
    } else {
      reports.push_back(arch::analyze(arch::resolve_architecture(name), o.batch));
    }
  }
  if (o.csv) {
    arch::write_report_csv(reports, out);
  } else {
    arch::write_report_table(reports, out);
  }
  return kExitOk;
}

// ---- predict ------------------------------------------------------------------

int run_predict(const LinkOptions& o, std::ostream& out) {
  const Workload w = resolve_workload(o);
  const comm::HardwareModel hw = hardware(o);
  const auto ps = p_values(o);
  const auto topos = topologies(o);
  const std::vector<std::string> header = {"topo", "p", "comm_s", "compute_s", "total_s", "speedup"};
  Table table(header);
  if (o.csv) print_csv_row(out, header);
  const double single = w.flops ? *w.flops / hw.worker_flops : 0.0;
  for (const auto& t : topos) {
    for (std::uint64_t p : ps) {
      const double comm_s = comm::comm_time(w.gradient_bytes, p, t, hw);
      const double compute_s = w.flops ? *w.flops / (static_cast<double>(p) * hw.worker_flops) : 0.0;
      const double total_s = comm_s + compute_s;
      const bool has_speedup = w.flops && total_s > 0.0;
      const double speedup = has_speedup ? single / total_s : 0.0;
      if (o.csv) {
        print_csv_row(out, {topo_label(t), std::to_string(p), shortest(comm_s), shortest(compute_s),
                            shortest(total_s), has_speedup ? shortest(speedup) : ""});
      } else {
        table.add({topo_label(t), std::to_string(p), fixed(comm_s, 6), fixed(compute_s, 6), fixed(total_s, 6),
                   has_speedup ? fixed(speedup, 3) : "-"});
      }
    }
  }
  if (!o.csv) {
    table.print(out);
    if (topos.size() == 2) {
      out << "crossover: tree:" << o.k << " is faster than ps from p = "
          << comm::crossover_workers(w.gradient_bytes, o.k, hw) << '\n';
    }
  }
  return kExitOk;
}

// ---- simulate -----------------------------------------------------------------

bool payload_check(const sim::CommPlan& plan) {
  sim::validate_plan(plan);
  std::size_t reduce_events = 0, broadcast_events = 0;
  for (const auto& l : plan.reduce) reduce_events += l.size();
  for (const auto& l : plan.broadcast) broadcast_events += l.size();
  const std::size_t p = plan.workers;
  if (reduce_events != p - 1 || broadcast_events != p - 1) return false;

  std::mt19937_64 gen(0x5eed0000ULL + p);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-40, 40);
  std::vector<sim::GradientBuffer> bufs(p);
  for (auto& b : bufs) {
    b.values.resize(kCheckValues);
    for (double& v : b.values) v = std::ldexp(mant(gen), expo(gen));
  }
  std::vector<double> expected(kCheckValues);
  for (std::size_t i = 0; i < kCheckValues; ++i) {
    sim::ExactSum acc;
    for (std::size_t r = 0; r < p; ++r) acc.add(bufs[r].values[i]);
    expected[i] = acc.to_double();
  }
  sim::allreduce_in_place(bufs, plan);
  for (const auto& b : bufs) {
    for (std::size_t i = 0; i < kCheckValues; ++i) {
      if (std::bit_cast<std::uint64_t>(b.values[i]) != std::bit_cast<std::uint64_t>(expected[i])) return false;
    }
  }
  return true;
}

int run_simulate(const LinkOptions& o, std::ostream& out, std::ostream& err) {
  const Workload w = resolve_workload(o);
  const comm::HardwareModel hw = hardware(o);
  const auto ps = p_values(o);
  std::vector<std::string> header = {"topo",      "p",        "reduce_s",      "broadcast_s", "comm_s",
                                     "analytic_s", "rel_diff", "max_compute_s", "total_s"};
  if (o.payload_check) header.push_back("payload_check");
  Table table(header);
  if (o.csv) print_csv_row(out, header);
  bool all_ok = true;
  for (const auto& t : topologies(o)) {
    for (std::uint64_t p : ps) {
      const sim::CommPlan plan = sim::plan_topology(t, p);
      sim::SimClockReport r = sim::simulate_comm_time(plan, w.gradient_bytes, hw);
      const double compute = w.flops ? *w.flops / (static_cast<double>(p) * hw.worker_flops) : 0.0;
      r.compute_seconds.assign(p, compute);
      const double analytic = comm::comm_time(w.gradient_bytes, p, t, hw);
      const double rel = analytic > 0.0 ? std::abs(r.reduce_seconds - analytic) / analytic : 0.0;
      std::vector<std::string> row;
      if (o.csv) {
        row = {topo_label(t),           std::to_string(p),   shortest(r.reduce_seconds),
               shortest(r.broadcast_seconds), shortest(r.comm_seconds), shortest(analytic),
               shortest(rel),           shortest(r.max_compute_seconds()), shortest(r.total_seconds())};
      } else {
        row = {topo_label(t),
               std::to_string(p),
               fixed(r.reduce_seconds, 6),
               fixed(r.broadcast_seconds, 6),
               fixed(r.comm_seconds, 6),
               fixed(analytic, 6),
               fixed(rel, 9),
               fixed(r.max_compute_seconds(), 6),
               fixed(r.total_seconds(), 6)};
      }
      if (o.payload_check) {
        const bool ok = payload_check(plan);
        all_ok = all_ok && ok;
        row.push_back(ok ? "ok" : "FAIL");
      }
      if (o.csv) {
        print_csv_row(out, row);
      } else {
        table.add(row);
      }
    }
  }
  if (!o.csv) table.print(out);
  if (!all_ok) {
    err << "treesum: error: payload check failed\n";
    return kExitConfig;
  }
  return kExitOk;
}

// ---- train / sweep ------------------------------------------------------------

struct TrainOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool csv = false;
};

struct SweepOptions {
  std::string config;
  std::string lrs;
  std::optional<std::uint64_t> seed;
  std::size_t parallel = 1;
  std::string out_dir;
  bool csv = false;
};

train::ExperimentConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
  train::ExperimentConfig c = path.empty() ? train::ExperimentConfig{} : train::load_experiment_config(path);
  if (seed) {
    c.hyper.seed = *seed;
  } else if (const char* env = std::getenv("TREESUM_SEED"); env != nullptr && *env != '\0') {
    try {
      c.hyper.seed = parse_count(trim(env));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("TREESUM_SEED: ") + e.what());
    }
  }
  return c;
}

std::string status_of(const train::RunResult& r) {
  return r.diverged ? "diverged@" + std::to_string(r.diverged_at) : "converged";
}

int run_train(const TrainOptions& o, std::ostream& out) {
  train::ExperimentConfig c = load_config(o.config, o.seed);
  if (!o.out.empty()) c.output = o.out;
  const train::RunResult r = train::run_experiment(c);
  if (!c.output.empty()) train::write_metrics(r.rows, c.output);
  if (o.csv) {
    train::write_metrics(r.rows, out);
  } else {
    const train::MetricsRow& last = r.rows.back();
    Table t({"field", "value"});
    t.add({"arch", c.arch});
    t.add({"seed", std::to_string(c.hyper.seed)});
    t.add({"workers", std::to_string(c.workers)});
    t.add({"topology", comm::to_string(c.topology)});
    t.add({"batch_size", std::to_string(c.hyper.batch_size)});
    t.add({"base_lr", shortest(r.base_lr)});
    t.add({"iterations", std::to_string(r.rows.size()) + "/" + std::to_string(r.iterations_planned)});
    t.add({"comm_events", std::to_string(r.comm_events)});
    t.add({"final_train_loss", shortest(last.train_loss)});
    t.add({"final_test_acc", fixed(r.final_test_acc, 4)});
    t.add({"simulated_wall_s", fixed(last.wall_s, 6)});
    t.add({"weights_digest", r.weights_digest});
    t.add({"status", status_of(r)});
    if (!c.output.empty()) t.add({"metrics", c.output});
    t.print(out);
  }
  return r.diverged ? kExitDiverged : kExitOk;
}

int run_sweep_cmd(const SweepOptions& o, std::ostream& out) {
  train::ExperimentConfig c = load_config(o.config, o.seed);
  if (!o.lrs.empty()) {
    try {
      c.lrs = parse_number_list(o.lrs);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--lrs: ") + e.what());
    }
  }
  if (c.lrs.empty()) throw UsageError("no learning rates: pass --lrs or set 'lrs' in the config");
  c.output.clear();
  const auto runs = train::run_sweep(c, o.parallel);
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    for (const auto& r : runs) {
      train::write_metrics(r.rows, (std::filesystem::path(o.out_dir) / ("lr_" + shortest(r.base_lr) + ".csv")).string());
    }
  }
  const std::vector<std::string> header = {"lr", "status", "iterations", "final_loss", "final_acc", "digest"};
  Table t(header);
  if (o.csv) print_csv_row(out, header);
  bool any_converged = false;
  for (const auto& r : runs) {
    any_converged = any_converged || !r.diverged;
    const double loss = r.rows.back().train_loss;
    if (o.csv) {
      print_csv_row(out, {shortest(r.base_lr), status_of(r), std::to_string(r.rows.size()), shortest(loss),
                          r.diverged ? "" : shortest(r.final_test_acc), r.weights_digest});
    } else {
      t.add({shortest(r.base_lr), status_of(r), std::to_string(r.rows.size()), shortest(loss),
             r.diverged ? "-" : fixed(r.final_test_acc, 4), r.weights_digest});
    }
  }
  if (!o.csv) t.print(out);
  return any_converged ? kExitOk : kExitDiverged;
}

// ---- report -------------------------------------------------------------------

struct ReportOptions {
  std::vector<std::string> inputs;
  bool csv = false;
};

int run_report(const ReportOptions& o, std::ostream& out) {
  std::vector<std::vector<train::MetricsRow>> runs;
  for (const auto& path : o.inputs) {
    runs.push_back(train::read_metrics(path));
    if (runs.back().empty()) throw ConfigError(path + ": no metrics rows");
  }
  const std::vector<std::string> header = {"input",   "rows",          "final_loss", "final_acc",
                                           "wall_s",  "max_rel_loss_diff", "acc_delta", "length_mismatch"};
  Table t(header);
  if (o.csv) print_csv_row(out, header);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& rows = runs[i];
    const train::DivergenceReport d = train::compare_metrics(runs[0], rows);
    std::optional<double> acc;
    for (auto it = rows.rbegin(); it != rows.rend() && !acc; ++it) acc = it->test_acc;
    const auto& last = rows.back();
    if (o.csv) {
      print_csv_row(out, {o.inputs[i], std::to_string(rows.size()), shortest(last.train_loss),
                          acc ? shortest(*acc) : "", shortest(last.wall_s), shortest(d.max_rel_loss_diff),
                          shortest(d.final_acc_delta), d.length_mismatch ? "1" : "0"});
    } else {
      t.add({o.inputs[i], std::to_string(rows.size()), shortest(last.train_loss), acc ? fixed(*acc, 4) : "-",
             fixed(last.wall_s, 6), shortest(d.max_rel_loss_diff), fixed(d.final_acc_delta, 4),
             d.length_mismatch ? "yes" : "no"});
    }
  }
  if (!o.csv) t.print(out);
  return kExitOk;
}

// ---- wiring -------------------------------------------------------------------

struct Commands {
  CLI::App app{"Data-parallel training cost model, cluster simulator and experiment runner.", "treesum"};
  AnalyzeOptions analyze;
  LinkOptions predict;
  LinkOptions simulate;
  TrainOptions train;
  SweepOptions sweep;
  ReportOptions report;
  std::map<std::string, CLI::App*> sub;

  Commands() {
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    auto* a = app.add_subcommand("analyze", "Weight and activation sizes, FLOPs and parallelism advice");
    a->add_option("--arch", analyze.arch, "Bundled name, JSON path, or 'all' (repeatable)")->capture_default_str();
    a->add_option("--batch", analyze.batch, "Batch size")->capture_default_str()->check(CLI::PositiveNumber);
    a->add_flag("--csv", analyze.csv, "Machine-readable CSV instead of a table");
    sub["analyze"] = a;

    auto* p = app.add_subcommand("predict", "Analytic communication and speedup curves");
    add_link_options(p, predict, false);
    sub["predict"] = p;

    auto* s = app.add_subcommand("simulate", "Event-driven clock of the allreduce plans");
    add_link_options(s, simulate, true);
    sub["simulate"] = s;

    auto* t = app.add_subcommand("train", "Run one training experiment");
    t->add_option("--config", train.config, "Experiment config JSON (defaults built in)");
    t->add_option("--seed", train.seed, "Seed; overrides TREESUM_SEED and the config");
    t->add_option("--out", train.out, "Metrics CSV path");
    t->add_flag("--csv", train.csv, "Print the metrics CSV instead of a summary");
    sub["train"] = t;

    auto* w = app.add_subcommand("sweep", "One training run per initial learning rate");
    w->add_option("--config", sweep.config, "Experiment config JSON (defaults built in)");
    w->add_option("--lrs", sweep.lrs, "Comma-separated learning rates; overrides the config list");
    w->add_option("--seed", sweep.seed, "Seed; overrides TREESUM_SEED and the config");
    w->add_option("--parallel", sweep.parallel, "Runs executed concurrently")
        ->capture_default_str()
        ->check(CLI::Range(1, 256));
    w->add_option("--out-dir", sweep.out_dir, "Directory for per-run metrics CSVs (lr_<lr>.csv)");
    w->add_flag("--csv", sweep.csv, "Machine-readable CSV instead of a table");
    sub["sweep"] = w;

    auto* r = app.add_subcommand("report", "Compare metrics CSVs against the first one");
    r->add_option("--inputs", report.inputs, "Metrics CSV paths")->required()->expected(1, -1);
    r->add_flag("--csv", report.csv, "Machine-readable CSV instead of a table");
    sub["report"] = r;
  }
};

}  // namespace

std::vector<std::uint64_t> parse_p_list(std::string_view text) {
  std::vector<std::string> parts = split(text, ',');
  for (auto& part : parts) part = trim(part);
  if (parts.empty() || (parts.size() == 1 && parts[0].empty())) throw std::invalid_argument("empty worker list");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(parse_count(parts[i]));
      if (out.back() == 0) throw std::invalid_argument("worker counts must be >= 1");
      continue;
    }
    if (i != 2 || parts.size() != 4) {
      throw std::invalid_argument("'...' must appear as a,b,...,z");
    }
    const std::uint64_t a = out[0], b = out[1];
    const std::uint64_t z = parse_count(parts[3]);
    if (b <= a) throw std::invalid_argument("a,b,...,z needs b > a");
    std::vector<std::uint64_t> seq;
    if (b % a == 0) {
      const std::uint64_t ratio = b / a;
      for (std::uint64_t v = b * ratio; v <= z; v *= ratio) {
        seq.push_back(v);
        if (v > z / ratio) break;
      }
    } else {
      for (std::uint64_t v = b + (b - a); v <= z; v += b - a) seq.push_back(v);
    }
    if (seq.empty() ? b != z : seq.back() != z) {
      throw std::invalid_argument("sequence " + std::to_string(a) + "," + std::to_string(b) + ",... does not reach " +
                                  std::to_string(z));
    }
    if (!seq.empty()) out.insert(out.end(), seq.begin(), seq.end());
    return out;
  }
  return out;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    part = trim(part);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw std::invalid_argument("'" + part + "' is not a number");
    }
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("'" + part + "' must be positive");
    out.push_back(v);
  }
  return out;
}

std::string help_text(const std::string& subcommand) {
  Commands c;
  if (subcommand.empty()) return c.app.help();
  const auto it = c.sub.find(subcommand);
  if (it == c.sub.end()) throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
  return it->second->help();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Commands c;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    c.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &c.app;
    for (auto* s : c.app.get_subcommands()) target = s;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << c.app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    CLI::App* target = &c.app;
    for (auto* s : c.app.get_subcommands()) target = s;
    err << "treesum: usage error: " << e.what() << "\n\n" << target->help();
    return kExitUsage;
  }
  CLI::App* chosen = c.app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    if (name == "analyze") return run_analyze(c.analyze, out);
    if (name == "predict") return run_predict(c.predict, out);
    if (name == "simulate") return run_simulate(c.simulate, out, err);
    if (name == "train") return run_train(c.train, out);
    if (name == "sweep") return run_sweep_cmd(c.sweep, out);
    if (name == "report") return run_report(c.report, out);
  } catch (const UsageError& e) {
    err << "treesum " << name << ": usage error: " << e.what() << "\n\n" << chosen->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "treesum " << name << ": error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitUsage;
}

}  // namespace treesum::cli
