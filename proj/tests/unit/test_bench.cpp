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


#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qallab/bench.hpp"
#include "qallab/error.hpp"

using namespace qallab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qallab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_full() {
  auto c = preset("donut_full");
  c.models = {{ModelFamily::EqnnZ, 1}, {ModelFamily::Hea, 1}};
  c.seeds = seed_range(3);
  c.epochs = 3;
  return c;
}

ExperimentConfig tiny_al() {
  auto c = preset("donut_al");
  c.models = {{ModelFamily::EqnnZ, 1}};
  c.seeds = seed_range(2);
  c.budget = 3;
  c.epochs_per_round = 2;
  return c;
}

CampaignRecord rec(std::uint64_t seed, const std::string& strategy, int q, int id,
                   double acc) {
  CampaignRecord r;
  r.seed = seed;
  r.strategy = strategy;
  r.query_idx = q;
  r.sample_id = id;
  r.test_acc = acc;
  r.val_acc = acc / 2;
  return r;
}

struct EnvGuard {
  ~EnvGuard() { unsetenv("QALLAB_THREADS"); }
};

}  // namespace

TEST_CASE("every preset validates") {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    CHECK_NOTHROW(c.validate());
    CHECK(c.name == name);
    if (c.kind != PresetKind::Symmetry) {
      CHECK(c.seeds.size() == static_cast<std::size_t>(kDefaultSeeds));
    }
  }
  CHECK_THROWS_AS(preset("nope"), StructuralError);
  const auto al = preset("donut_al");
  REQUIRE(al.arms.size() == 3);
  CHECK(al.arms[2].label() == "fidelity");
  CHECK(preset("ttt_al_oracle").arms[1].label() == "entropy+oracle");
}

TEST_CASE("overrides") {
  auto c = preset("donut_al");
  apply_overrides(c, nlohmann::json::parse(R"({
    "seeds": 4, "budget": 7, "epochs_per_round": 5, "learning_rate": 0.05,
    "update_mode": "online", "retrain": "from_scratch",
    "models": [{"family": "hea", "depth": 2}],
    "strategies": [{"kind": "fidelity", "lambda": 0.5}, {"kind": "random"}]
  })"));
  CHECK(c.seeds == seed_range(4));
  CHECK(c.budget == 7);
  CHECK(c.epochs_per_round == 5);
  CHECK(c.learning_rate == 0.05);
  CHECK(c.update_mode == UpdateMode::Online);
  CHECK(c.retrain == RetrainMode::FromScratch);
  REQUIRE(c.models.size() == 1);
  CHECK(c.models[0].family == ModelFamily::Hea);
  CHECK(c.models[0].depth == 2);
  REQUIRE(c.arms.size() == 2);
  CHECK(c.arms[0].strategy.lambda == 0.5);
  apply_overrides(c, nlohmann::json::parse(R"({"seeds": [3, 9]})"));
  CHECK(c.seeds == std::vector<int>{3, 9});

  // Round trip through JSON.
  auto d = preset("donut_full");
  apply_overrides(d, to_json(c));
  CHECK(to_json(d) == to_json(c));

  CHECK_THROWS_AS(apply_overrides(c, nlohmann::json::parse(R"({"epoch": 3})")),
                  StructuralError);
  auto bad = c;
  apply_overrides(bad, nlohmann::json::parse(R"({"budget": -1})"));
  CHECK_THROWS_AS(bad.validate(), StructuralError);
  CHECK_THROWS_AS(apply_overrides(c, nlohmann::json::parse(
                      R"({"strategies": [{"kind": "greedy"}]})")),
                  StructuralError);
}

TEST_CASE("mean_std uses the population deviation") {
  const auto m = mean_std({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(m.n == 4);
  CHECK(mean_std({}).n == 0);
}

TEST_CASE("pooled standard error") {
  const std::vector<double> a{0.8, 0.9, 1.0};
  const std::vector<double> b{0.5, 0.7};
  // Unbiased variances 0.01 and 0.02.
  CHECK(pooled_standard_error(a, b) == doctest::Approx(std::sqrt(0.01 / 3 + 0.02 / 2)));
  CHECK_THROWS_AS(pooled_standard_error({1.0}, b), StructuralError);
}

TEST_CASE("parallel_for runs every job once and rethrows") {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](int i) {
                                 if (i == 7) throw NumericError("job 7");
                               }),
                  NumericError);
  CHECK_THROWS_AS(parallel_for(1, 0, [](int) {}), StructuralError);
}

TEST_CASE("thread count from the environment") {
  EnvGuard guard;
  setenv("QALLAB_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  setenv("QALLAB_THREADS", "0", 1);
  CHECK_THROWS_AS(default_threads(), StructuralError);
  setenv("QALLAB_THREADS", "2x", 1);
  CHECK_THROWS_AS(default_threads(), StructuralError);
  unsetenv("QALLAB_THREADS");
  CHECK(default_threads() >= 1);
}

TEST_CASE("run seeds are distinct and stable") {
  CHECK(run_seed(1, 0) == run_seed(1, 0));
  CHECK(run_seed(1, 0) != run_seed(1, 1));
  CHECK(run_seed(1, 0) != run_seed(2, 0));
}

TEST_CASE("full-label results do not depend on the worker count") {
  const auto data = to_dataset(gen_donut(60, 1));
  const auto cfg = tiny_full();
  const auto dir = temp_dir("full_threads");
  const auto one = run_full_label(cfg, data, 1);
  const auto two = run_full_label(cfg, data, 2);
  write_full_label_csv(dir / "one.csv", one);
  write_full_label_csv(dir / "two.csv", two);
  CHECK(slurp(dir / "one.csv") == slurp(dir / "two.csv"));
  REQUIRE(one.runs.size() == 6);
  CHECK(one.runs[0].model == "eqnn_z_d1");
  CHECK(one.runs[3].model == "hea_d1");
  REQUIRE(one.summaries.size() == 2);
  std::vector<double> acc;
  for (int i = 0; i < 3; ++i) acc.push_back(one.runs[static_cast<std::size_t>(i)].test_acc);
  CHECK(one.summaries[0].test_acc.mean == doctest::Approx(mean_std(acc).mean));
}

TEST_CASE("active-learning suite is deterministic across worker counts") {
  const auto data = to_dataset(gen_donut(60, 1));
  const auto cfg = tiny_al();
  const auto dir = temp_dir("al_threads");
  const auto one = run_al_suite(cfg, data, 1);
  const auto two = run_al_suite(cfg, data, 2);
  REQUIRE(one.size() == 1);
  write_campaign_csv(dir / "one.csv", one[0].records);
  write_campaign_csv(dir / "two.csv", two[0].records);
  CHECK(slurp(dir / "one.csv") == slurp(dir / "two.csv"));
  // Three arms, two seeds, budget plus the initial row.
  CHECK(one[0].records.size() == 3 * 2 * 4);
  CHECK(one[0].records.front().strategy == "random");
}

TEST_CASE("campaign csv round trip and summary") {
  const std::vector<CampaignRecord> log{
      rec(0, "random", 0, -1, 0.5), rec(0, "random", 1, 12, 0.625),
      rec(1, "random", 0, -1, 0.75), rec(1, "random", 1, 4, 0.875),
      rec(0, "least_confidence", 0, -1, 0.5), rec(0, "least_confidence", 1, 7, 0.9)};
  const auto dir = temp_dir("campaign_csv");
  write_campaign_csv(dir / "c.csv", log);
  const auto back = read_campaign_csv(dir / "c.csv");
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back[i].seed == log[i].seed);
    CHECK(back[i].strategy == log[i].strategy);
    CHECK(back[i].query_idx == log[i].query_idx);
    CHECK(back[i].sample_id == log[i].sample_id);
    CHECK(back[i].test_acc == log[i].test_acc);
    CHECK(back[i].val_acc == log[i].val_acc);
  }

  const auto summary = campaign_summary_json(back);
  const auto& random = summary["strategies"]["random"];
  REQUIRE(random.size() == 2);
  CHECK(random[1]["query_idx"] == 1);
  CHECK(random[1]["mean_acc"].get<double>() == doctest::Approx(0.75));
  CHECK(random[1]["std_acc"].get<double>() == doctest::Approx(0.125));
  CHECK(random[1]["n_seeds"] == 2);

  const auto curves = aggregate_curves(back);
  REQUIRE(curves.size() == 4);
  CHECK(curves[0].strategy == "random");
  CHECK(curves[2].strategy == "least_confidence");
  CHECK(accuracies_at(back, "random", 1) == std::vector<double>{0.625, 0.875});

  CHECK_THROWS_AS(read_campaign_csv(dir / "missing.csv"), StructuralError);
}

TEST_CASE("query bias counts classes of queried samples") {
  Dataset data;
  data.features = Eigen::MatrixXd::Zero(4, 2);
  data.labels = {0, 1, 1, 1};
  data.class_names = {"0", "1"};
  CHECK(report_bias({}, data).empty());
  const std::vector<CampaignRecord> log{
      rec(0, "random", 0, -1, 0.5), rec(0, "random", 1, 0, 0.5),
      rec(0, "random", 2, 2, 0.5), rec(0, "entropy", 1, 3, 0.5)};
  const auto rows = report_bias(log, data);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].strategy == "random");
  CHECK(rows[0].counts == std::vector<int>{1, 1});
  CHECK(rows[0].total == 2);
  CHECK(rows[1].counts == std::vector<int>{0, 1});
  CHECK_THROWS_AS(report_bias({rec(0, "random", 1, 9, 0.5)}, data), StructuralError);
}

TEST_CASE("acceptance checks on synthetic results") {
  FullLabelResult full;
  full.summaries.push_back({"eqnn_z_d3", {0.9, 0.01, 40}, 50.0, 0.88, 0.92});
  full.summaries.push_back({"hea_d6", {0.77, 0.01, 40}, 50.0, 0.75, 0.8});
  auto checks = check_full_label(full);
  REQUIRE(checks.size() == 3);
  for (const auto& c : checks) CHECK(c.passed);
  full.summaries[1].test_acc.mean = 0.95;
  checks = check_full_label(full);
  CHECK_FALSE(checks[1].passed);
  CHECK_FALSE(checks[2].passed);

  // Least confidence beats random by a clear margin on every seed.
  AlResult al{"eqnn_z_d3", {}};
  for (int s = 0; s < 4; ++s) {
    for (int q = 0; q <= 6; ++q) {
      al.records.push_back(rec(s, "random", q, q - 1, 0.6 + 0.01 * s));
      al.records.push_back(rec(s, "least_confidence", q, q - 1, q == 6 ? 0.96 : 0.6));
    }
  }
  checks = check_al({al});
  REQUIRE(checks.size() == 2);
  CHECK(checks[0].passed);
  CHECK(checks[1].passed);

  // One seed per arm cannot support a standard error.
  AlResult single{"hea_d6", {rec(0, "random", 0, -1, 0.5),
                             rec(0, "least_confidence", 0, -1, 0.5)}};
  checks = check_al({single});
  REQUIRE(checks.size() == 1);
  CHECK_FALSE(checks[0].passed);
}

TEST_CASE("symmetry report matches expectations") {
  const auto rows = symmetry_report(5, 1);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.as_expected());
  const auto j = symmetry_report_json(rows);
  REQUIRE(j.is_array());
  CHECK(j.size() == 4);
  CHECK(j[1]["expected_equivariant"] == false);
}
