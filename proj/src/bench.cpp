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

#include "qallab/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <tuple>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "qallab/error.hpp"
#include "qallab/rng.hpp"

namespace qallab {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Donut: return "donut";
    case Task::Ttt: return "ttt";
    case Task::TttBinary: return "ttt_binary";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  for (auto t : {Task::Donut, Task::Ttt, Task::TttBinary}) {
    if (name == to_string(t)) return t;
  }
  throw StructuralError("unknown task: " + std::string(name));
}

std::string Arm::label() const {
  return std::string(to_string(strategy.kind)) + (oracle_init ? "+oracle" : "");
}

namespace {

int classes_of(Task task) { return task == Task::Ttt ? 3 : 2; }

bool fits_task(const ModelSpec& m, Task task) {
  switch (task) {
    case Task::Donut:
      return m.family == ModelFamily::EqnnZ || m.family == ModelFamily::Hea;
    case Task::Ttt: return m.family == ModelFamily::Ttt;
    case Task::TttBinary: return m.family == ModelFamily::TttBinary;
  }
  return false;
}

std::string model_label(const ModelSpec& m) {
  std::string s(to_string(m.family));
  if (m.family == ModelFamily::Ttt || m.family == ModelFamily::TttBinary) {
    s += "_l" + std::to_string(m.layers);
  }
  return s + "_d" + std::to_string(m.depth);
}

ModelSpec spec(ModelFamily family, int depth, int layers = 1) {
  ModelSpec m;
  m.family = family;
  m.depth = depth;
  m.layers = layers;
  return m;
}

Arm arm(StrategyKind kind, bool oracle_init = false) {
  Arm a;
  a.strategy.kind = kind;
  a.oracle_init = oracle_init;
  return a;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty()) throw StructuralError("experiment needs a name");
  if (kind == PresetKind::Symmetry) {
    if (symmetry_trials < 1) throw StructuralError("symmetry_trials must be >= 1");
    return;
  }
  if (models.empty()) throw StructuralError(name + ": no models");
  if (seeds.empty()) throw StructuralError(name + ": no seeds");
  if (std::set<int>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw StructuralError(name + ": duplicate seeds");
  }
  for (const auto& m : models) {
    if (!fits_task(m, task)) {
      throw StructuralError(name + ": model " + model_label(m) +
                            " does not fit task " + std::string(to_string(task)));
    }
    if (m.depth < 1 || m.layers < 1) throw StructuralError(name + ": depth and layers must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw StructuralError(name + ": learning_rate must be > 0");
  if (kind == PresetKind::FullLabel && epochs < 1) {
    throw StructuralError(name + ": epochs must be >= 1");
  }
  if (kind == PresetKind::ActiveLearning) {
    if (arms.empty()) throw StructuralError(name + ": no strategies");
    if (budget < 0) throw StructuralError(name + ": budget must be >= 0");
    if (epochs_per_round < 1) throw StructuralError(name + ": epochs_per_round must be >= 1");
    std::set<std::string> labels;
    for (const auto& a : arms) {
      a.strategy.validate();
      if (!labels.insert(a.label()).second) {
        throw StructuralError(name + ": duplicate strategy " + a.label());
      }
      if (a.strategy.kind == StrategyKind::Fidelity && classes_of(task) != 2) {
        throw StructuralError(name + ": fidelity sampling requires a binary task");
      }
    }
  }
}

std::vector<int> seed_range(int n) {
  std::vector<int> s(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
  return s;
}

std::vector<std::string> preset_names() {
  return {"donut_full", "donut_al", "ttt_full", "ttt_al",
          "ttt_al_oracle", "ttt_binary_al", "symmetry_report"};
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  c.seeds = seed_range(kDefaultSeeds);
  const ModelSpec eqnn = spec(ModelFamily::EqnnZ, 3);
  const ModelSpec hea = spec(ModelFamily::Hea, 6);
  if (name == "donut_full") {
    c.models = {eqnn, hea};
  } else if (name == "donut_al") {
    c.kind = PresetKind::ActiveLearning;
    c.models = {eqnn, hea};
    c.arms = {arm(StrategyKind::Random), arm(StrategyKind::LeastConfidence),
              arm(StrategyKind::Fidelity)};
  } else if (name == "ttt_full") {
    c.task = Task::Ttt;
    c.models = {spec(ModelFamily::Ttt, 5, 2)};
    c.epochs = 200;
  } else if (name == "ttt_al" || name == "ttt_al_oracle") {
    c.kind = PresetKind::ActiveLearning;
    c.task = Task::Ttt;
    c.models = {spec(ModelFamily::Ttt, 5, 2)};
    c.arms = {arm(StrategyKind::Random),
              arm(StrategyKind::Entropy, name == "ttt_al_oracle")};
    c.budget = 20;
  } else if (name == "ttt_binary_al") {
    c.kind = PresetKind::ActiveLearning;
    c.task = Task::TttBinary;
    c.models = {spec(ModelFamily::TttBinary, 5, 2)};
    c.arms = {arm(StrategyKind::Random), arm(StrategyKind::LeastConfidence)};
    c.budget = 20;
  } else if (name == "symmetry_report") {
    c.kind = PresetKind::Symmetry;
  } else {
    throw StructuralError("unknown preset: " + std::string(name));
  }
  c.data_path = std::filesystem::path("data") / default_data_file(c.task);
  return c;
}

namespace {

using nlohmann::json;

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  for (const auto& [key, value] : j.items()) {
    if (key == "family") m.family = parse_model_family(value.get<std::string>());
    else if (key == "depth") m.depth = value.get<int>();
    else if (key == "layers") m.layers = value.get<int>();
    else if (key == "ttt_encoding_scale") {
      const auto s = value.get<std::string>();
      if (s == "2pi/3") m.ttt_scale = TttEncodingScale::TwoPiThirds;
      else if (s == "2/3") m.ttt_scale = TttEncodingScale::TwoThirds;
      else throw StructuralError("ttt_encoding_scale must be \"2pi/3\" or \"2/3\"");
    } else {
      throw StructuralError("unknown model key: " + key);
    }
  }
  return m;
}

json model_to_json(const ModelSpec& m) {
  return {{"family", to_string(m.family)},
          {"depth", m.depth},
          {"layers", m.layers},
          {"ttt_encoding_scale",
           m.ttt_scale == TttEncodingScale::TwoPiThirds ? "2pi/3" : "2/3"}};
}

Arm arm_from_json(const json& j) {
  Arm a;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") a.strategy.kind = parse_strategy(value.get<std::string>());
    else if (key == "lambda") a.strategy.lambda = value.get<double>();
    else if (key == "committee_size") a.strategy.committee_size = value.get<int>();
    else if (key == "oracle_init") a.oracle_init = value.get<bool>();
    else throw StructuralError("unknown strategy key: " + key);
  }
  return a;
}

json arm_to_json(const Arm& a) {
  return {{"kind", to_string(a.strategy.kind)},
          {"lambda", a.strategy.lambda},
          {"committee_size", a.strategy.committee_size},
          {"oracle_init", a.oracle_init}};
}

std::string_view to_string(RetrainMode mode) {
  return mode == RetrainMode::WarmStart ? "warm_start" : "from_scratch";
}

RetrainMode parse_retrain(std::string_view s) {
  if (s == "warm_start") return RetrainMode::WarmStart;
  if (s == "from_scratch") return RetrainMode::FromScratch;
  throw StructuralError("retrain must be warm_start or from_scratch");
}

}  // namespace

void apply_overrides(ExperimentConfig& c, const json& j) {
  if (!j.is_object()) throw StructuralError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "name") c.name = value.get<std::string>();
      else if (key == "preset") {}
      else if (key == "rng") {
        // Recorded for provenance; only the built-in generator is available.
        if (value.get<std::string>() != Rng::kName) {
          throw StructuralError("unsupported rng: " + value.get<std::string>());
        }
      }
      else if (key == "task") c.task = parse_task(value.get<std::string>());
      else if (key == "models") {
        c.models.clear();
        for (const auto& m : value) c.models.push_back(model_from_json(m));
      } else if (key == "strategies") {
        c.arms.clear();
        for (const auto& a : value) c.arms.push_back(arm_from_json(a));
      } else if (key == "seeds") {
        c.seeds = value.is_number() ? seed_range(value.get<int>())
                                    : value.get<std::vector<int>>();
      } else if (key == "master_seed") c.master_seed = value.get<std::uint64_t>();
      else if (key == "split_seed") c.split_seed = value.get<std::uint64_t>();
      else if (key == "epochs") c.epochs = value.get<int>();
      else if (key == "budget") c.budget = value.get<int>();
      else if (key == "epochs_per_round") c.epochs_per_round = value.get<int>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "update_mode") c.update_mode = parse_update_mode(value.get<std::string>());
      else if (key == "retrain") c.retrain = parse_retrain(value.get<std::string>());
      else if (key == "symmetry_trials") c.symmetry_trials = value.get<int>();
      else if (key == "data_path") c.data_path = value.get<std::string>();
      else throw StructuralError("unknown config key: " + key);
    }
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  json models = json::array();
  for (const auto& m : c.models) models.push_back(model_to_json(m));
  json arms = json::array();
  for (const auto& a : c.arms) arms.push_back(arm_to_json(a));
  return {{"name", c.name},
          {"task", to_string(c.task)},
          {"models", models},
          {"strategies", arms},
          {"seeds", c.seeds},
          {"master_seed", c.master_seed},
          {"split_seed", c.split_seed},
          {"epochs", c.epochs},
          {"budget", c.budget},
          {"epochs_per_round", c.epochs_per_round},
          {"learning_rate", c.learning_rate},
          {"update_mode", to_string(c.update_mode)},
          {"retrain", to_string(c.retrain)},
          {"symmetry_trials", c.symmetry_trials},
          {"data_path", c.data_path.generic_string()},
          {"rng", Rng::kName}};
}

std::uint64_t run_seed(std::uint64_t master, int index) {
  return derive_seed(master, static_cast<std::uint64_t>(index));
}

std::filesystem::path default_data_file(Task task) {
  return task == Task::Donut ? "donut.csv" : "ttt.csv";
}

Dataset load_task_data(Task task, const std::filesystem::path& path) {
  if (task == Task::Donut) return to_dataset(read_donut_csv(path));
  return to_dataset(read_ttt_csv(path), task == Task::TttBinary);
}

int default_threads() {
  if (const char* env = std::getenv("QALLAB_THREADS"); env && *env) {
    int n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc() || ptr != end || n < 1) {
      throw StructuralError("QALLAB_THREADS must be a positive integer");
    }
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  if (threads < 1) throw StructuralError("threads must be >= 1");
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int spawn = std::min(threads, n) - 1;
  std::vector<std::thread> pool;
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  out.n = static_cast<int>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.n;
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / out.n);
  return out;
}

double pooled_standard_error(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw StructuralError("standard error needs at least 2 values per group");
  }
  const auto var = [](const std::vector<double>& v) {
    const MeanStd m = mean_std(v);
    return m.std * m.std * m.n / (m.n - 1);  // unbiased
  };
  return std::sqrt(var(a) / static_cast<double>(a.size()) +
                   var(b) / static_cast<double>(b.size()));
}

FullLabelResult run_full_label(const ExperimentConfig& config,
                               const Dataset& data, int threads) {
  config.validate();
  if (config.kind != PresetKind::FullLabel) {
    throw StructuralError(config.name + " is not a full-label preset");
  }
  const SplitDataset sp = split(static_cast<std::size_t>(data.size()), config.split_seed);
  const Dataset pool = data.subset(sp.pool);
  const Dataset validation = data.subset(sp.validation);
  const Dataset test = data.subset(sp.test);
  const TrainConfig train_cfg{config.epochs, config.learning_rate, config.update_mode};

  std::vector<Model> models;
  for (const auto& m : config.models) models.emplace_back(m);
  const int n_seeds = static_cast<int>(config.seeds.size());
  FullLabelResult result;
  result.runs.resize(models.size() * config.seeds.size());
  parallel_for(static_cast<int>(result.runs.size()), threads, [&](int job) {
    const Model& model = models[static_cast<std::size_t>(job / n_seeds)];
    const int seed = config.seeds[static_cast<std::size_t>(job % n_seeds)];
    Rng rng(derive_seed(run_seed(config.master_seed, seed), 1));
    const TrainResult r = train(model, init_params(model.n_params(), rng), pool,
                                validation, train_cfg);
    FullLabelRun& run = result.runs[static_cast<std::size_t>(job)];
    run.model = model_label(model.spec());
    run.seed = seed;
    run.test_acc = model.accuracy(r.best_params, test.features, test.labels);
    run.val_acc = r.best_val_acc;
    run.best_epoch = r.best_epoch;
  });
  for (std::size_t m = 0; m < models.size(); ++m) {
    FullLabelSummary s;
    s.model = model_label(config.models[m]);
    std::vector<double> acc;
    double epochs = 0.0;
    for (int k = 0; k < n_seeds; ++k) {
      const auto& run = result.runs[m * config.seeds.size() + static_cast<std::size_t>(k)];
      acc.push_back(run.test_acc);
      epochs += run.best_epoch;
    }
    s.test_acc = mean_std(acc);
    s.mean_best_epoch = epochs / n_seeds;
    s.min_test_acc = *std::min_element(acc.begin(), acc.end());
    s.max_test_acc = *std::max_element(acc.begin(), acc.end());
    result.summaries.push_back(s);
  }
  return result;
}

std::vector<CurvePoint> aggregate_curves(const std::vector<CampaignRecord>& log) {
  std::vector<std::string> order;
  std::map<std::string, std::map<int, std::vector<double>>> groups;
  for (const auto& r : log) {
    if (!groups.count(r.strategy)) order.push_back(r.strategy);
    groups[r.strategy][r.query_idx].push_back(r.test_acc);
  }
  std::vector<CurvePoint> out;
  for (const auto& s : order) {
    for (const auto& [q, values] : groups[s]) out.push_back({s, q, mean_std(values)});
  }
  return out;
}

std::vector<double> accuracies_at(const std::vector<CampaignRecord>& log,
                                  std::string_view strategy, int query_idx) {
  std::vector<double> out;
  for (const auto& r : log) {
    if (r.strategy == strategy && r.query_idx == query_idx) out.push_back(r.test_acc);
  }
  return out;
}

std::vector<AlResult> run_al_suite(const ExperimentConfig& config,
                                   const Dataset& data, int threads) {
  config.validate();
  if (config.kind != PresetKind::ActiveLearning) {
    throw StructuralError(config.name + " is not an active-learning preset");
  }
  const SplitDataset sp = split(static_cast<std::size_t>(data.size()), config.split_seed);
  const std::size_t n_arms = config.arms.size();
  const std::size_t n_seeds = config.seeds.size();
  const std::size_t per_model = n_arms * n_seeds;
  std::vector<std::vector<CampaignRecord>> logs(config.models.size() * per_model);
  parallel_for(static_cast<int>(logs.size()), threads, [&](int job) {
    const auto j = static_cast<std::size_t>(job);
    const std::size_t m = j / per_model;
    const Arm& a = config.arms[(j % per_model) / n_seeds];
    const int seed = config.seeds[j % n_seeds];
    CampaignConfig cc;
    cc.model = config.models[m];
    cc.strategy = a.strategy;
    cc.budget = config.budget;
    cc.epochs_per_round = config.epochs_per_round;
    cc.learning_rate = config.learning_rate;
    cc.update_mode = config.update_mode;
    cc.retrain = config.retrain;
    cc.oracle_init = a.oracle_init;
    logs[j] = run_campaign(cc, data, sp, run_seed(config.master_seed, seed));
    for (auto& r : logs[j]) r.seed = static_cast<std::uint64_t>(seed);
  });
  std::vector<AlResult> out;
  for (std::size_t m = 0; m < config.models.size(); ++m) {
    AlResult res;
    res.model = model_label(config.models[m]);
    for (std::size_t k = 0; k < per_model; ++k) {
      auto& l = logs[m * per_model + k];
      res.records.insert(res.records.end(), l.begin(), l.end());
    }
    out.push_back(std::move(res));
  }
  return out;
}

std::vector<BiasRow> report_bias(const std::vector<CampaignRecord>& log,
                                 const Dataset& data) {
  std::vector<BiasRow> rows;
  for (const auto& r : log) {
    if (r.sample_id < 0) continue;
    if (r.sample_id >= data.size()) {
      throw StructuralError("sample id " + std::to_string(r.sample_id) +
                            " is outside the dataset");
    }
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const BiasRow& b) { return b.strategy == r.strategy; });
    if (it == rows.end()) {
      rows.push_back({r.strategy, std::vector<int>(static_cast<std::size_t>(data.n_classes())), 0});
      it = rows.end() - 1;
    }
    it->counts[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(r.sample_id)])]++;
    it->total++;
  }
  return rows;
}

std::vector<SymmetryRow> symmetry_report(int trials, std::uint64_t seed) {
  struct Case {
    ModelSpec model;
    GroupRep rep;
    bool expected;
  };
  const std::vector<Case> cases = {
      {spec(ModelFamily::EqnnZ, 3), z2_zz(), true},
      {spec(ModelFamily::Hea, 6), z2_zz(), false},
      {spec(ModelFamily::Ttt, 5, 2), d4_perm(), true},
      {spec(ModelFamily::TttBinary, 5, 2), d4_perm(), true},
  };
  std::vector<SymmetryRow> rows;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    Rng rng(derive_seed(seed, k));
    const Model model(cases[k].model);
    SymmetryRow row;
    row.model = model_label(cases[k].model);
    row.report = check_circuit_equivariance(model.circuit(), cases[k].rep, trials, rng);
    row.report.subject = row.model;
    row.expected_equivariant = cases[k].expected;
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json symmetry_report_json(const std::vector<SymmetryRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"model", r.model},
                   {"representation", r.report.rep},
                   {"trials", r.report.trials},
                   {"max_deviation", r.report.max_deviation},
                   {"tolerance", kEquivarianceTolerance},
                   {"equivariant", r.report.passed},
                   {"expected_equivariant", r.expected_equivariant}});
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path.string());
  return out;
}

json mean_std_json(const MeanStd& m) {
  return {{"mean", m.mean}, {"std", m.std}, {"n", m.n}};
}

}  // namespace

void write_full_label_csv(const std::filesystem::path& path,
                          const FullLabelResult& result) {
  std::ofstream out = open_out(path);
  out << "model,seed,test_acc,val_acc,best_epoch\n";
  for (const auto& r : result.runs) {
    out << r.model << ',' << r.seed << ',' << fmt(r.test_acc) << ','
        << fmt(r.val_acc) << ',' << r.best_epoch << '\n';
  }
}

nlohmann::json full_label_summary_json(const ExperimentConfig& config,
                                       const FullLabelResult& result) {
  json models = json::array();
  for (const auto& s : result.summaries) {
    models.push_back({{"model", s.model},
                      {"test_acc", mean_std_json(s.test_acc)},
                      {"min_test_acc", s.min_test_acc},
                      {"max_test_acc", s.max_test_acc},
                      {"mean_best_epoch", s.mean_best_epoch}});
  }
  return {{"config", to_json(config)}, {"models", models}};
}

void write_campaign_csv(const std::filesystem::path& path,
                        const std::vector<CampaignRecord>& log) {
  std::ofstream out = open_out(path);
  out << "seed,strategy,query_idx,sample_id,test_acc,val_acc\n";
  for (const auto& r : log) {
    out << r.seed << ',' << r.strategy << ',' << r.query_idx << ','
        << r.sample_id << ',' << fmt(r.test_acc) << ',' << fmt(r.val_acc) << '\n';
  }
}

std::vector<CampaignRecord> read_campaign_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw StructuralError("missing campaign file " + path.string() +
                          "; produce it with `qallab run-al`");
  }
  std::string line;
  std::getline(in, line);
  if (line != "seed,strategy,query_idx,sample_id,test_acc,val_acc") {
    throw StructuralError(path.string() + ": unexpected header");
  }
  std::vector<CampaignRecord> log;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) {
      throw StructuralError(path.string() + ": row " + std::to_string(row) +
                            " does not have 6 fields");
    }
    try {
      CampaignRecord r;
      r.seed = std::stoull(f[0]);
      r.strategy = f[1];
      r.query_idx = std::stoi(f[2]);
      r.sample_id = std::stoi(f[3]);
      r.test_acc = std::stod(f[4]);
      r.val_acc = std::stod(f[5]);
      log.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw StructuralError(path.string() + ": row " + std::to_string(row) +
                            " is malformed");
    }
  }
  return log;
}

nlohmann::json campaign_summary_json(const std::vector<CampaignRecord>& log) {
  json strategies = json::object();
  for (const auto& p : aggregate_curves(log)) {
    strategies[p.strategy].push_back({{"query_idx", p.query_idx},
                                      {"mean_acc", p.acc.mean},
                                      {"std_acc", p.acc.std},
                                      {"n_seeds", p.acc.n}});
  }
  return {{"strategies", strategies}};
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurvePoint>& curves) {
  std::ofstream out = open_out(path);
  out << "strategy,query_idx,mean_acc,std_acc,n_seeds\n";
  for (const auto& p : curves) {
    out << p.strategy << ',' << p.query_idx << ',' << fmt(p.acc.mean) << ','
        << fmt(p.acc.std) << ',' << p.acc.n << '\n';
  }
}

void write_bias_csv(const std::filesystem::path& path,
                    const std::vector<BiasRow>& rows,
                    const std::vector<std::string>& class_names) {
  std::ofstream out = open_out(path);
  out << "strategy,class,count,fraction\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.counts.size(); ++c) {
      out << r.strategy << ',' << class_names.at(c) << ',' << r.counts[c] << ','
          << fmt(r.total ? static_cast<double>(r.counts[c]) / r.total : 0.0) << '\n';
    }
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

const FullLabelSummary* find_summary(const FullLabelResult& r, std::string_view model) {
  for (const auto& s : r.summaries) {
    if (s.model == model) return &s;
  }
  return nullptr;
}

std::string describe(const MeanStd& m) {
  return pct(m.mean) + " +- " + pct(m.std) + " over " + std::to_string(m.n) + " seeds";
}

bool has_strategy(const std::vector<CampaignRecord>& log, std::string_view s) {
  return std::any_of(log.begin(), log.end(),
                     [&](const CampaignRecord& r) { return r.strategy == s; });
}

int final_query(const std::vector<CampaignRecord>& log, std::string_view s) {
  int q = -1;
  for (const auto& r : log) {
    if (r.strategy == s) q = std::max(q, r.query_idx);
  }
  return q;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::vector<CriterionResult> check_full_label(const FullLabelResult& result) {
  std::vector<CriterionResult> out;
  const auto* eqnn = find_summary(result, "eqnn_z_d3");
  const auto* hea = find_summary(result, "hea_d6");
  const auto* ttt = find_summary(result, "ttt_eqnn_l2_d5");
  if (eqnn) {
    out.push_back({"donut EQNN-Z full-label mean in [87.4%, 95.9%]",
                   kDonutEqnnBand.contains(eqnn->test_acc.mean), describe(eqnn->test_acc)});
  }
  if (hea) {
    out.push_back({"donut HEA full-label mean in [75.2%, 79.4%]",
                   kDonutHeaBand.contains(hea->test_acc.mean), describe(hea->test_acc)});
  }
  if (eqnn && hea) {
    out.push_back({"donut EQNN-Z mean exceeds HEA mean",
                   eqnn->test_acc.mean > hea->test_acc.mean,
                   pct(eqnn->test_acc.mean) + " vs " + pct(hea->test_acc.mean)});
  }
  if (ttt) {
    out.push_back({"TTT full-label mean in [70.3%, 83.4%]",
                   kTttBand.contains(ttt->test_acc.mean), describe(ttt->test_acc)});
    out.push_back({"TTT best seed >= 85%", ttt->max_test_acc >= kTttBestSeedFloor,
                   "best " + pct(ttt->max_test_acc)});
    out.push_back({"TTT every seed beats 33.33%", ttt->min_test_acc > kTttBlindGuess,
                   "worst " + pct(ttt->min_test_acc)});
  }
  return out;
}

std::vector<CriterionResult> check_al(const std::vector<AlResult>& results) {
  std::vector<CriterionResult> out;
  const std::string random(to_string(StrategyKind::Random));
  const std::string lc(to_string(StrategyKind::LeastConfidence));
  const std::string entropy(to_string(StrategyKind::Entropy));
  const std::string oracle = entropy + "+oracle";
  for (const auto& res : results) {
    const auto& log = res.records;
    if (!has_strategy(log, random)) continue;
    const int last = final_query(log, random);
    const auto compare = [&](const std::string& other, int q) {
      const auto a = accuracies_at(log, other, q);
      const auto b = accuracies_at(log, random, q);
      const double se = a.size() < 2 || b.size() < 2
                            ? std::numeric_limits<double>::quiet_NaN()
                            : pooled_standard_error(a, b);
      return std::tuple{mean_std(a).mean - mean_std(b).mean, se};
    };
    const auto detail = [&](double diff, double se, int q) {
      return "diff " + pct(diff) + ", SE " + pct(se) + " at query " + std::to_string(q);
    };
    if (starts_with(res.model, "eqnn_z") && has_strategy(log, lc)) {
      const auto [diff, se] = compare(lc, last);
      out.push_back({"donut EQNN-Z least_confidence - random >= 1 SE at final budget",
                     diff >= se, detail(diff, se, last)});
      double best = 0.0;
      for (const auto& r : log) {
        if (r.strategy == lc && r.query_idx <= kDonutAlTargetQueries) {
          best = std::max(best, r.test_acc);
        }
      }
      out.push_back({"donut EQNN-Z least_confidence reaches 95% within 6 queries",
                     best >= kDonutAlTarget, "best " + pct(best)});
    }
    if (starts_with(res.model, "hea") && has_strategy(log, lc)) {
      const auto [diff, se] = compare(lc, last);
      out.push_back({"donut HEA |least_confidence - random| <= 1 SE at final budget",
                     std::abs(diff) <= se, detail(diff, se, last)});
    }
    if (starts_with(res.model, "ttt_eqnn_l") && has_strategy(log, entropy)) {
      const auto [diff, se] = compare(entropy, last);
      out.push_back({"TTT entropy - random <= 1 SE at final budget", diff <= se,
                     detail(diff, se, last)});
    }
    if (starts_with(res.model, "ttt_eqnn_l") && has_strategy(log, oracle)) {
      bool ok = true;
      std::string d;
      for (int q = 0; q <= kOracleEarlyQueries; ++q) {
        const double diff = std::get<0>(compare(oracle, q));
        ok = ok && diff > 0.0;
        d += (q ? " " : "diffs ") + pct(diff);
      }
      out.push_back({"TTT entropy+oracle mean exceeds random at queries 0..5", ok, d});
    }
    if (starts_with(res.model, "ttt_eqnn_binary") && has_strategy(log, lc)) {
      const double diff = std::get<0>(compare(lc, last));
      out.push_back({"TTT binary least_confidence mean >= random at final budget",
                     diff >= 0.0, "diff " + pct(diff)});
    }
  }
  return out;
}

}  // namespace qallab
