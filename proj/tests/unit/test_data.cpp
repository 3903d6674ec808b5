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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qallab/data.hpp"
#include "qallab/error.hpp"
#include "qallab/symmetry.hpp"

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

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

}  // namespace

TEST_CASE("donut label at reference angles") {
  CHECK(donut_label(0.0) == 1);
  CHECK(donut_label(std::numbers::pi / 2) == 0);
}

TEST_CASE("donut label is antipodal") {
  for (int k = 0; k < 360; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / 360.0 + 1e-3;
    CHECK(donut_label(theta) == donut_label(theta + std::numbers::pi));
  }
}

TEST_CASE("gen_donut labels follow the angle and are deterministic") {
  const auto a = gen_donut(500, 1);
  const auto b = gen_donut(500, 1);
  REQUIRE(a.size() == 500);
  int ones = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x0 == b[i].x0);
    CHECK(a[i].x1 == b[i].x1);
    CHECK(a[i].label == donut_label(std::atan2(a[i].x1, a[i].x0)));
    ones += a[i].label;
  }
  // Both classes cover half the circle each.
  CHECK(ones > 200);
  CHECK(ones < 300);
  CHECK(gen_donut(10, 2)[0].x0 != a[0].x0);
  CHECK_THROWS_AS(gen_donut(0, 1), StructuralError);
}

TEST_CASE("board winner examples") {
  CHECK(board_winner({1, 1, 1, -1, -1, 0, 0, 0, 0}) == Winner::Cross);
  CHECK(board_winner({-1, 1, 1, -1, 1, 0, -1, 0, 0}) == Winner::Circle);
  CHECK(board_winner({1, -1, 1, 1, -1, -1, -1, 1, 1}) == Winner::Draw);
  CHECK_THROWS_AS(board_winner({1, 1, 1, -1, -1, -1, 0, 0, 0}), StructuralError);
  CHECK_THROWS_AS(board_winner({2, 0, 0, 0, 0, 0, 0, 0, 0}), StructuralError);
}

TEST_CASE("board labels are D4 invariant") {
  const auto boards = gen_ttt(300, 7);
  for (const auto& b : boards) {
    for (const auto& g : d4_elements()) {
      CHECK(board_winner(permute_board(b.cells, g)) == b.label);
    }
  }
}

TEST_CASE("permute_board moves cell i to images[i]") {
  const BoardCells cells{1, 0, 0, 0, 0, 0, 0, 0, -1};
  const auto out = permute_board(cells, d4_rotation());
  CHECK(out[6] == 1);
  CHECK(out[2] == -1);
}

TEST_CASE("gen_ttt yields distinct legal final boards") {
  const auto boards = gen_ttt(500, 1);
  REQUIRE(boards.size() == 500);
  std::set<BoardCells> seen;
  int counts[3] = {0, 0, 0};
  for (const auto& b : boards) {
    CHECK(seen.insert(b.cells).second);
    int x = 0;
    int o = 0;
    for (int v : b.cells) {
      x += v == 1;
      o += v == -1;
    }
    // Cross moves first.
    CHECK((x == o || x == o + 1));
    CHECK(board_winner(b.cells) == b.label);
    if (b.label == Winner::Draw) CHECK(x + o == 9);
    ++counts[static_cast<int>(b.label)];
  }
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
  CHECK(counts[2] > counts[0]);
}

TEST_CASE("binary tic-tac-toe drops draws") {
  const auto boards = gen_ttt(200, 3);
  const auto full = to_dataset(boards, false);
  const auto bin = to_dataset(boards, true);
  int draws = 0;
  for (int l : full.labels) draws += l == 1;
  CHECK(bin.size() == full.size() - draws);
  CHECK(bin.n_classes() == 2);
  for (int l : bin.labels) CHECK((l == 0 || l == 1));
  CHECK(full.n_classes() == 3);
  CHECK(full.features.cols() == 9);
}

TEST_CASE("split sizes") {
  auto s = split(500, 101);
  CHECK(s.pool.size() == 300);
  CHECK(s.validation.size() == 100);
  CHECK(s.test.size() == 100);
  s = split(5, 1);
  CHECK(s.pool.size() == 3);
  CHECK(s.validation.size() == 1);
  CHECK(s.test.size() == 1);
  s = split(12, 1);
  CHECK(s.pool.size() + s.validation.size() + s.test.size() == 12);
  CHECK(s.validation.size() == s.test.size());
  CHECK_THROWS_AS(split(4, 1), StructuralError);
}

TEST_CASE("split parts are disjoint and deterministic") {
  const auto a = split(500, 101);
  const auto b = split(500, 101);
  CHECK(a.pool == b.pool);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  std::set<int> all(a.pool.begin(), a.pool.end());
  all.insert(a.validation.begin(), a.validation.end());
  all.insert(a.test.begin(), a.test.end());
  CHECK(all.size() == 500);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 499);
  CHECK(split(500, 102).pool != a.pool);
}

TEST_CASE("subset keeps order") {
  const auto d = to_dataset(gen_donut(20, 1));
  const auto s = d.subset({5, 2, 5});
  REQUIRE(s.size() == 3);
  CHECK(s.features(0, 0) == d.features(5, 0));
  CHECK(s.features(1, 1) == d.features(2, 1));
  CHECK(s.labels[2] == d.labels[5]);
}

TEST_CASE("donut csv round trip is exact and byte stable") {
  const auto dir = temp_dir("donut_csv");
  const auto samples = gen_donut(100, 5);
  write_donut_csv(dir / "a.csv", samples);
  const auto back = read_donut_csv(dir / "a.csv");
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].x0 == samples[i].x0);
    CHECK(back[i].x1 == samples[i].x1);
    CHECK(back[i].label == samples[i].label);
  }
  write_donut_csv(dir / "b.csv", gen_donut(100, 5));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("ttt csv round trip") {
  const auto dir = temp_dir("ttt_csv");
  const auto boards = gen_ttt(50, 2);
  write_ttt_csv(dir / "t.csv", boards);
  const auto back = read_ttt_csv(dir / "t.csv");
  REQUIRE(back.size() == boards.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].cells == boards[i].cells);
    CHECK(back[i].label == boards[i].label);
  }
}

TEST_CASE("csv readers reject bad input") {
  const auto dir = temp_dir("bad_csv");
  try {
    read_donut_csv(dir / "missing.csv");
    FAIL("expected an error");
  } catch (const StructuralError& e) {
    CHECK(std::string(e.what()).find("gen-data") != std::string::npos);
  }
  write_text(dir / "header.csv", "a,b,c\n0.1,0.2,1\n");
  CHECK_THROWS_AS(read_donut_csv(dir / "header.csv"), StructuralError);

  const auto good = dir / "good.csv";
  write_donut_csv(good, gen_donut(3, 1));
  std::string text = slurp(good);
  const auto header_end = text.find('\n');
  write_text(dir / "label.csv", text.substr(0, header_end + 1) + "0.1,0.2,7\n");
  CHECK_THROWS_AS(read_donut_csv(dir / "label.csv"), StructuralError);
  write_text(dir / "num.csv", text.substr(0, header_end + 1) + "abc,0.2,1\n");
  CHECK_THROWS_AS(read_donut_csv(dir / "num.csv"), StructuralError);

  // A board whose stored label disagrees with its content.
  const auto tgood = dir / "tgood.csv";
  write_ttt_csv(tgood, {Board{{1, 1, 1, -1, -1, 0, 0, 0, 0}, Winner::Cross}});
  text = slurp(tgood);
  const auto pos = text.rfind('2');
  text[pos] = '0';
  write_text(dir / "tbad.csv", text);
  CHECK_THROWS_AS(read_ttt_csv(dir / "tbad.csv"), StructuralError);
}
