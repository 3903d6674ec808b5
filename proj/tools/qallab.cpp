// Copyright 2026 The qallab Authors
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

// Command-line front end for dataset generation and benchmark presets.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include "qallab/active.hpp"
#include "qallab/bench.hpp"
#include "qallab/data.hpp"
#include "qallab/error.hpp"

namespace fs = std::filesystem;
using namespace qallab;

namespace {

constexpr int kExitCheckFailed = 2;

struct RunOptions {
  std::string preset;
  std::string config_file;
  std::string data;
  std::string out = "results";
  int seeds = 0;
  bool fast = false;
  int threads = 0;
  bool check = false;
  std::uint64_t master_seed = 0;
  bool master_seed_set = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o, const std::string& default_preset) {
  o.preset = default_preset;
  cmd->add_option("--preset", o.preset, "Experiment preset")->capture_default_str();
  cmd->add_option("--config", o.config_file, "JSON file overriding preset fields");
  cmd->add_option("--data", o.data, "Dataset CSV (default: data/<task>.csv)");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--seeds", o.seeds, "Number of seeds (default 40)");
  cmd->add_flag("--fast", o.fast, "Run 10 seeds");
  cmd->add_option("--threads", o.threads, "Worker count (default: QALLAB_THREADS or all cores)");
  cmd->add_flag("--check", o.check, "Exit with status 2 if a reproduction band fails");
  cmd->add_option("--master-seed", o.master_seed, "Master seed for parameter draws")
      ->each([&](const std::string&) { o.master_seed_set = true; });
}

ExperimentConfig resolve(const RunOptions& o) {
  ExperimentConfig c = preset(o.preset);
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw StructuralError("cannot read config " + o.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw StructuralError(o.config_file + ": " + e.what());
    }
    apply_overrides(c, j);
  }
  if (o.fast) c.seeds = seed_range(kFastSeeds);
  if (o.seeds > 0) c.seeds = seed_range(o.seeds);
  if (o.master_seed_set) c.master_seed = o.master_seed;
  if (!o.data.empty()) c.data_path = o.data;
  c.validate();
  return c;
}

int threads_of(const RunOptions& o) { return o.threads > 0 ? o.threads : default_threads(); }

int report(const std::vector<CriterionResult>& criteria, bool check) {
  bool ok = true;
  for (const auto& c : criteria) {
    std::printf("%s  %s  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
    ok = ok && c.passed;
  }
  return check && !ok ? kExitCheckFailed : 0;
}

int gen_data(const std::string& task, int n, std::uint64_t seed, const fs::path& out) {
  if (n < 1) throw StructuralError("--n must be >= 1");
  fs::create_directories(out);
  const fs::path file = out / (task + ".csv");
  std::vector<int> counts;
  if (task == "donut") {
    const auto samples = gen_donut(n, seed);
    write_donut_csv(file, samples);
    counts.assign(2, 0);
    for (const auto& s : samples) counts[static_cast<std::size_t>(s.label)]++;
  } else if (task == "ttt") {
    const auto boards = gen_ttt(n, seed);
    write_ttt_csv(file, boards);
    counts.assign(3, 0);
    for (const auto& b : boards) counts[static_cast<std::size_t>(b.label)]++;
  } else {
    throw StructuralError("--task must be donut or ttt");
  }
  write_manifest(out / (task + ".manifest.json"), task, n, seed,
                 file.filename().string(), counts);
  std::printf("wrote %s (class counts:", file.string().c_str());
  for (int c : counts) std::printf(" %d", c);
  std::printf(")\n");
  return 0;
}

int train_full(const RunOptions& o) {
  const ExperimentConfig c = resolve(o);
  const Dataset data = load_task_data(c.task, c.data_path);
  const FullLabelResult r = run_full_label(c, data, threads_of(o));
  const fs::path out(o.out);
  write_full_label_csv(out / (c.name + "_runs.csv"), r);
  write_json(out / (c.name + "_summary.json"), full_label_summary_json(c, r));
  for (const auto& s : r.summaries) {
    std::printf("%-20s test %.4f +- %.4f  (min %.4f, max %.4f)  epochs-to-best %.1f\n",
                s.model.c_str(), s.test_acc.mean, s.test_acc.std, s.min_test_acc,
                s.max_test_acc, s.mean_best_epoch);
  }
  return report(check_full_label(r), o.check);
}

int run_al(const RunOptions& o) {
  const ExperimentConfig c = resolve(o);
  const Dataset data = load_task_data(c.task, c.data_path);
  const auto results = run_al_suite(c, data, threads_of(o));
  const fs::path out(o.out);
  nlohmann::json summary{{"config", to_json(c)}, {"models", nlohmann::json::object()}};
  for (const auto& res : results) {
    const std::string stem = c.name + "_" + res.model;
    write_campaign_csv(out / (stem + ".csv"), res.records);
    write_curve_csv(out / (stem + "_curves.csv"), aggregate_curves(res.records));
    summary["models"][res.model] = campaign_summary_json(res.records);
    for (const auto& p : aggregate_curves(res.records)) {
      if (p.query_idx == c.budget || p.query_idx == 0) {
        std::printf("%-22s %-18s query %2d  acc %.4f +- %.4f\n", res.model.c_str(),
                    p.strategy.c_str(), p.query_idx, p.acc.mean, p.acc.std);
      }
    }
  }
  write_json(out / (c.name + "_summary.json"), summary);
  return report(check_al(results), o.check);
}

int verify_symmetry(int trials, std::uint64_t seed, const std::string& out, bool check) {
  const auto rows = symmetry_report(trials, seed);
  std::vector<CriterionResult> criteria;
  for (const auto& r : rows) {
    char detail[96];
    std::snprintf(detail, sizeof detail, "max deviation %.3g over %d draws",
                  r.report.max_deviation, r.report.trials);
    criteria.push_back({r.model + (r.expected_equivariant ? " is " : " is not ") +
                            "equivariant under " + r.report.rep,
                        r.as_expected(), detail});
  }
  if (!out.empty()) write_json(out, symmetry_report_json(rows));
  const int status = report(criteria, true);
  return check ? status : 0;
}

int report_bias_cmd(const std::string& campaign, const std::string& task,
                    const std::string& data_path, const std::string& out) {
  const Task t = parse_task(task);
  const Dataset data = load_task_data(t, data_path);
  const auto rows = report_bias(read_campaign_csv(campaign), data);
  std::printf("%-20s", "strategy");
  for (const auto& name : data.class_names) std::printf(" %10s", name.c_str());
  std::printf("\n");
  for (const auto& r : rows) {
    std::printf("%-20s", r.strategy.c_str());
    for (int c : r.counts) std::printf(" %10.3f", r.total ? double(c) / r.total : 0.0);
    std::printf("\n");
  }
  std::vector<int> pool_counts(static_cast<std::size_t>(data.n_classes()));
  for (int l : data.labels) pool_counts[static_cast<std::size_t>(l)]++;
  std::printf("%-20s", "(dataset)");
  for (int c : pool_counts) std::printf(" %10.3f", double(c) / data.size());
  std::printf("\n");
  if (!out.empty()) write_bias_csv(out, rows, data.class_names);
  return 0;
}

struct BoundaryOptions {
  std::string model = "eqnn_z";
  int depth = 3;
  std::string strategy = "least_confidence";
  int seed = 0;
  int budget = 6;
  std::uint64_t master_seed = 1;
  std::uint64_t split_seed = 101;
  int resolution = 101;
  double extent = 1.0;
  std::string data = "data/donut.csv";
};

int plot_boundary(const BoundaryOptions& b, const fs::path& out) {
  if (b.resolution < 2) throw StructuralError("--resolution must be >= 2");
  const Dataset data = load_task_data(Task::Donut, b.data);
  CampaignConfig cc;
  cc.model.family = parse_model_family(b.model);
  cc.model.depth = b.depth;
  cc.strategy.kind = parse_strategy(b.strategy);
  cc.budget = b.budget;
  std::vector<Eigen::VectorXd> params;
  const auto log = run_campaign(cc, data, split(static_cast<std::size_t>(data.size()), b.split_seed),
                                run_seed(b.master_seed, b.seed), &params);
  const Model model(cc.model);
  const int n = b.resolution;
  Eigen::MatrixXd grid(n * n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      grid(i * n + j, 0) = -b.extent + 2.0 * b.extent * j / (n - 1);
      grid(i * n + j, 1) = -b.extent + 2.0 * b.extent * i / (n - 1);
    }
  }
  const Eigen::MatrixXd p = model.probabilities(params.front(), grid);
  fs::create_directories(out);
  {
    std::ofstream f(out / "boundary_grid.csv", std::ios::binary);
    f << "x0,x1,p1\n";
    char line[96];
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", grid(r, 0), grid(r, 1), p(r, 1));
      f << line;
    }
  }
  {
    std::ofstream f(out / "queries.csv", std::ios::binary);
    f << "query_idx,sample_id,x0,x1,label\n";
    char line[128];
    for (const auto& r : log) {
      if (r.sample_id < 0) continue;
      std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%d\n", r.query_idx, r.sample_id,
                    data.features(r.sample_id, 0), data.features(r.sample_id, 1), r.label);
      f << line;
    }
  }
  std::printf("wrote %s and %s (final test accuracy %.4f)\n",
              (out / "boundary_grid.csv").string().c_str(),
              (out / "queries.csv").string().c_str(), log.back().test_acc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qallab: quantum active-learning laboratory"};
  app.require_subcommand(1);

  std::string task = "donut";
  int n = 500;
  std::uint64_t seed = 1;
  std::string out_dir = "data";
  auto* gen = app.add_subcommand("gen-data", "Generate a labeled dataset");
  gen->add_option("--task", task, "donut or ttt")->capture_default_str();
  gen->add_option("--n", n, "Number of samples")->capture_default_str();
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->capture_default_str();

  RunOptions full;
  auto* train = app.add_subcommand("train-full", "Full-label training over many seeds");
  add_run_options(train, full, "donut_full");

  RunOptions al;
  auto* run = app.add_subcommand("run-al", "Active-learning campaigns over strategies and seeds");
  add_run_options(run, al, "donut_al");

  int trials = 100;
  std::uint64_t sym_seed = 1;
  std::string sym_out;
  bool sym_check = false;
  auto* sym = app.add_subcommand("verify-symmetry", "Check circuit equivariance of each model");
  sym->add_option("--trials", trials, "Random parameter draws")->capture_default_str();
  sym->add_option("--seed", sym_seed, "Seed for parameter draws")->capture_default_str();
  sym->add_option("--out", sym_out, "Write a JSON report here");
  sym->add_flag("--check", sym_check, "Exit with status 2 on an unexpected outcome");

  std::string campaign, bias_task = "ttt", bias_data = "data/ttt.csv", bias_out;
  auto* bias = app.add_subcommand("report-bias", "Class composition of queried samples");
  bias->add_option("--campaign", campaign, "Campaign CSV from run-al")->required();
  bias->add_option("--task", bias_task, "donut, ttt or ttt_binary")->capture_default_str();
  bias->add_option("--data", bias_data, "Dataset CSV")->capture_default_str();
  bias->add_option("--out", bias_out, "Write a tidy CSV here");

  auto* plot = app.add_subcommand("plot-data", "Export tidy CSVs for the plotting scripts");
  plot->require_subcommand(1);
  std::string curve_in, curve_out = "curves.csv";
  auto* curves = plot->add_subcommand("curves", "Mean accuracy per strategy and query");
  curves->add_option("--campaign", curve_in, "Campaign CSV from run-al")->required();
  curves->add_option("--out", curve_out, "Output CSV")->capture_default_str();
  BoundaryOptions bo;
  std::string boundary_out = "boundary";
  auto* boundary = plot->add_subcommand("boundary", "Donut decision boundary after a campaign");
  boundary->add_option("--model", bo.model, "eqnn_z or hea")->capture_default_str();
  boundary->add_option("--depth", bo.depth, "Ansatz depth")->capture_default_str();
  boundary->add_option("--strategy", bo.strategy, "Query strategy")->capture_default_str();
  boundary->add_option("--seed", bo.seed, "Run index")->capture_default_str();
  boundary->add_option("--budget", bo.budget, "Queries")->capture_default_str();
  boundary->add_option("--master-seed", bo.master_seed, "Master seed")->capture_default_str();
  boundary->add_option("--split-seed", bo.split_seed, "Split seed")->capture_default_str();
  boundary->add_option("--resolution", bo.resolution, "Grid points per axis")->capture_default_str();
  boundary->add_option("--extent", bo.extent, "Grid half-width")->capture_default_str();
  boundary->add_option("--data", bo.data, "Donut CSV")->capture_default_str();
  boundary->add_option("--out", boundary_out, "Output directory")->capture_default_str();
  std::string bias_csv_in, bias_csv_data = "data/ttt.csv", bias_csv_task = "ttt",
                           bias_csv_out = "bias.csv";
  auto* bias_plot = plot->add_subcommand("bias", "Queried-class composition");
  bias_plot->add_option("--campaign", bias_csv_in, "Campaign CSV from run-al")->required();
  bias_plot->add_option("--task", bias_csv_task, "ttt or ttt_binary")->capture_default_str();
  bias_plot->add_option("--data", bias_csv_data, "Dataset CSV")->capture_default_str();
  bias_plot->add_option("--out", bias_csv_out, "Output CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return gen_data(task, n, seed, out_dir);
    if (*train) return train_full(full);
    if (*run) return run_al(al);
    if (*sym) return verify_symmetry(trials, sym_seed, sym_out, sym_check);
    if (*bias) return report_bias_cmd(campaign, bias_task, bias_data, bias_out);
    if (*curves) {
      write_curve_csv(curve_out, aggregate_curves(read_campaign_csv(curve_in)));
      return 0;
    }
    if (*boundary) return plot_boundary(bo, boundary_out);
    if (*bias_plot) {
      const Dataset data = load_task_data(parse_task(bias_csv_task), bias_csv_data);
      write_bias_csv(bias_csv_out, report_bias(read_campaign_csv(bias_csv_in), data),
                     data.class_names);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
