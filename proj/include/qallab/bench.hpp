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

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qallab/active.hpp"
#include "qallab/data.hpp"
#include "qallab/models.hpp"
#include "qallab/symmetry.hpp"
#include "qallab/training.hpp"

namespace qallab {

/// Which dataset a preset trains on.
enum class Task { Donut, Ttt, TttBinary };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

enum class PresetKind { FullLabel, ActiveLearning, Symmetry };

/// One strategy column of an active-learning grid.
struct Arm {
  Strategy strategy;
  bool oracle_init = false;

  std::string label() const;
};

struct ExperimentConfig {
  std::string name;
  PresetKind kind = PresetKind::FullLabel;
  Task task = Task::Donut;
  std::vector<ModelSpec> models;
  std::vector<Arm> arms;  // active learning only
  std::vector<int> seeds;  // run indices; defaults to 0..39
  std::uint64_t master_seed = 1;
  std::uint64_t split_seed = 101;
  int epochs = 100;  // full-label training
  int budget = 30;
  int epochs_per_round = 50;
  double learning_rate = 0.1;
  UpdateMode update_mode = UpdateMode::FullBatch;
  RetrainMode retrain = RetrainMode::WarmStart;
  int symmetry_trials = 100;
  std::filesystem::path data_path;

  void validate() const;
};

inline constexpr int kDefaultSeeds = 40;
inline constexpr int kFastSeeds = 10;

std::vector<int> seed_range(int n);

std::vector<std::string> preset_names();
ExperimentConfig preset(std::string_view name);

/// Overrides preset fields from a JSON object; unknown keys are errors.
void apply_overrides(ExperimentConfig& config, const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// Seed of run `index` under `master`.
std::uint64_t run_seed(std::uint64_t master, int index);

/// Default data file for a task, relative to a data directory.
std::filesystem::path default_data_file(Task task);

Dataset load_task_data(Task task, const std::filesystem::path& path);

/// Worker count from QALLAB_THREADS, else the hardware concurrency.
int default_threads();

/// Runs `n` independent jobs on `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& job);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  int n = 0;
};

MeanStd mean_std(const std::vector<double>& values);

/// Standard error of a difference of two independent means.
double pooled_standard_error(const std::vector<double>& a,
                             const std::vector<double>& b);

struct FullLabelRun {
  std::string model;
  int seed = 0;
  double test_acc = 0.0;
  double val_acc = 0.0;
  int best_epoch = 0;
};

struct FullLabelSummary {
  std::string model;
  MeanStd test_acc;
  double mean_best_epoch = 0.0;
  double min_test_acc = 0.0;
  double max_test_acc = 0.0;
};

struct FullLabelResult {
  std::vector<FullLabelRun> runs;  // model-major, then seed
  std::vector<FullLabelSummary> summaries;
};

FullLabelResult run_full_label(const ExperimentConfig& config,
                               const Dataset& data, int threads);

struct CurvePoint {
  std::string strategy;
  int query_idx = 0;
  MeanStd acc;
};

/// Mean test accuracy per (strategy, query_idx), in first-seen strategy order.
std::vector<CurvePoint> aggregate_curves(const std::vector<CampaignRecord>& log);

/// Test accuracies of one strategy at one query index, seed order.
std::vector<double> accuracies_at(const std::vector<CampaignRecord>& log,
                                  std::string_view strategy, int query_idx);

struct AlResult {
  std::string model;
  std::vector<CampaignRecord> records;  // arm-major, then seed, then query
};

std::vector<AlResult> run_al_suite(const ExperimentConfig& config,
                                   const Dataset& data, int threads);

struct BiasRow {
  std::string strategy;
  std::vector<int> counts;  // queried samples per class
  int total = 0;
};

/// Classes of queried samples per strategy, looked up in `data`.
std::vector<BiasRow> report_bias(const std::vector<CampaignRecord>& log,
                                 const Dataset& data);

struct SymmetryRow {
  std::string model;
  EquivarianceReport report;
  bool expected_equivariant = true;

  bool as_expected() const { return report.passed == expected_equivariant; }
};

/// Circuit equivariance of every model family under its task symmetry.
std::vector<SymmetryRow> symmetry_report(int trials, std::uint64_t seed);
nlohmann::json symmetry_report_json(const std::vector<SymmetryRow>& rows);

/// One pass/fail line of a reproduction check.
struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Accuracy bands for the full-label benchmarks.
struct Band {
  double lo;
  double hi;

  bool contains(double v) const { return v >= lo && v <= hi; }
};

inline constexpr Band kDonutEqnnBand{0.874, 0.959};
inline constexpr Band kDonutHeaBand{0.752, 0.794};
inline constexpr Band kTttBand{0.703, 0.834};
inline constexpr double kTttBestSeedFloor = 0.85;
inline constexpr double kTttBlindGuess = 1.0 / 3.0;
inline constexpr double kDonutAlTarget = 0.95;
inline constexpr int kDonutAlTargetQueries = 6;
inline constexpr int kOracleEarlyQueries = 5;

/// Checks whichever full-label criteria apply to the models in `result`.
std::vector<CriterionResult> check_full_label(const FullLabelResult& result);
/// Checks whichever active-learning criteria apply to the arms present.
std::vector<CriterionResult> check_al(const std::vector<AlResult>& results);

void write_full_label_csv(const std::filesystem::path& path,
                          const FullLabelResult& result);
nlohmann::json full_label_summary_json(const ExperimentConfig& config,
                                       const FullLabelResult& result);

void write_campaign_csv(const std::filesystem::path& path,
                        const std::vector<CampaignRecord>& log);
std::vector<CampaignRecord> read_campaign_csv(const std::filesystem::path& path);
nlohmann::json campaign_summary_json(const std::vector<CampaignRecord>& log);
void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurvePoint>& curves);
void write_bias_csv(const std::filesystem::path& path,
                    const std::vector<BiasRow>& rows,
                    const std::vector<std::string>& class_names);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace qallab
