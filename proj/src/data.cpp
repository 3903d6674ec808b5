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

#include "qallab/data.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qallab/error.hpp"
#include "qallab/rng.hpp"

namespace qallab {

int donut_label(double theta) {
  return std::cos(2.0 * theta + 0.58) > 0.0 ? 1 : 0;
}

std::vector<DonutSample> gen_donut(int n, std::uint64_t seed) {
  if (n < 1) throw StructuralError("gen_donut: n must be >= 1");
  Rng rng(seed);
  std::vector<DonutSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = rng.gaussian(0.5, 0.15);
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    out.push_back({r * std::cos(theta), r * std::sin(theta), donut_label(theta)});
  }
  return out;
}

std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::Circle: return "circle";
    case Winner::Draw: return "draw";
    case Winner::Cross: return "cross";
  }
  return "?";
}

namespace {

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                              {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

bool owns_line(const BoardCells& c, int mark) {
  for (const auto& line : kLines) {
    if (c[line[0]] == mark && c[line[1]] == mark && c[line[2]] == mark) {
      return true;
    }
  }
  return false;
}

}  // namespace

Winner board_winner(const BoardCells& cells) {
  for (int v : cells) {
    if (v < -1 || v > 1) throw StructuralError("board cells must be -1, 0 or 1");
  }
  const bool cross = owns_line(cells, 1);
  const bool circle = owns_line(cells, -1);
  if (cross && circle) throw StructuralError("both players own a line");
  if (cross) return Winner::Cross;
  if (circle) return Winner::Circle;
  return Winner::Draw;
}

BoardCells permute_board(const BoardCells& cells,
                         const std::vector<int>& images) {
  BoardCells out{};
  for (std::size_t i = 0; i < 9; ++i) {
    out[static_cast<std::size_t>(images[i])] = cells[i];
  }
  return out;
}

std::vector<Board> gen_ttt(int n, std::uint64_t seed) {
  if (n < 1) throw StructuralError("gen_ttt: n must be >= 1");
  Rng rng(seed);
  std::set<BoardCells> seen;
  std::vector<Board> out;
  constexpr long kMaxGames = 10'000'000;
  for (long game = 0; static_cast<int>(out.size()) < n; ++game) {
    if (game >= kMaxGames) {
      throw StructuralError("gen_ttt: could not collect " + std::to_string(n) +
                            " distinct final boards");
    }
    BoardCells cells{};
    int player = 1;
    for (;;) {
      std::vector<std::size_t> empty;
      for (std::size_t i = 0; i < 9; ++i) {
        if (cells[i] == 0) empty.push_back(i);
      }
      cells[empty[static_cast<std::size_t>(rng.below(empty.size()))]] = player;
      if (owns_line(cells, player) || empty.size() == 1) break;
      player = -player;
    }
    if (seen.insert(cells).second) out.push_back({cells, board_winner(cells)});
  }
  return out;
}

Dataset Dataset::subset(const std::vector<int>& ids) const {
  Dataset d{task, Eigen::MatrixXd(static_cast<Eigen::Index>(ids.size()),
                                  features.cols()),
            {}, class_names};
  for (std::size_t k = 0; k < ids.size(); ++k) {
    d.features.row(static_cast<Eigen::Index>(k)) = features.row(ids[k]);
    d.labels.push_back(labels[static_cast<std::size_t>(ids[k])]);
  }
  return d;
}

Dataset to_dataset(const std::vector<DonutSample>& samples) {
  Dataset d{"donut", Eigen::MatrixXd(static_cast<Eigen::Index>(samples.size()), 2),
            {}, {"0", "1"}};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    d.features(static_cast<Eigen::Index>(i), 0) = samples[i].x0;
    d.features(static_cast<Eigen::Index>(i), 1) = samples[i].x1;
    d.labels.push_back(samples[i].label);
  }
  return d;
}

Dataset to_dataset(const std::vector<Board>& boards, bool binary) {
  Dataset d;
  d.task = binary ? "ttt_binary" : "ttt";
  d.class_names = binary ? std::vector<std::string>{"circle", "cross"}
                         : std::vector<std::string>{"circle", "draw", "cross"};
  std::vector<const Board*> kept;
  for (const auto& b : boards) {
    if (!binary || b.label != Winner::Draw) kept.push_back(&b);
  }
  d.features.resize(static_cast<Eigen::Index>(kept.size()), 9);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t q = 0; q < 9; ++q) {
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) =
          kept[i]->cells[q];
    }
    const int cls = static_cast<int>(kept[i]->label);
    d.labels.push_back(binary ? (cls == 0 ? 0 : 1) : cls);
  }
  return d;
}

SplitDataset split(std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 5) throw StructuralError("split needs at least 5 samples");
  std::vector<int> order(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t fifth = n_samples / 5;
  const std::size_t pool = n_samples - 2 * fifth;
  SplitDataset s;
  s.seed = seed;
  s.pool.assign(order.begin(), order.begin() + static_cast<long>(pool));
  s.validation.assign(order.begin() + static_cast<long>(pool),
                      order.begin() + static_cast<long>(pool + fifth));
  s.test.assign(order.begin() + static_cast<long>(pool + fifth), order.end());
  return s;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw StructuralError("cannot write " + path.string());
  return f;
}

std::vector<std::vector<std::string>> read_rows(
    const std::filesystem::path& path, std::string_view header) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw StructuralError("cannot read " + path.string() +
                          " (generate it with `qallab gen-data`)");
  }
  std::string line;
  if (!std::getline(f, line) || line != header) {
    throw StructuralError(path.string() + ": expected header '" +
                          std::string(header) + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void write_donut_csv(const std::filesystem::path& path,
                     const std::vector<DonutSample>& samples) {
  auto f = open_out(path);
  f << "x0,x1,label\n";
  char buf[96];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", s.x0, s.x1, s.label);
    f << buf;
  }
}

void write_ttt_csv(const std::filesystem::path& path,
                   const std::vector<Board>& boards) {
  auto f = open_out(path);
  f << "g0,g1,g2,g3,g4,g5,g6,g7,g8,label\n";
  for (const auto& b : boards) {
    for (int v : b.cells) f << v << ',';
    f << static_cast<int>(b.label) << '\n';
  }
}

std::vector<DonutSample> read_donut_csv(const std::filesystem::path& path) {
  std::vector<DonutSample> out;
  std::size_t row = 1;
  for (const auto& cells : read_rows(path, "x0,x1,label")) {
    ++row;
    if (cells.size() != 3) {
      throw StructuralError(path.string() + ": bad row " + std::to_string(row));
    }
    DonutSample d;
    try {
      d = {std::stod(cells[0]), std::stod(cells[1]), std::stoi(cells[2])};
    } catch (const std::logic_error&) {
      throw StructuralError(path.string() + ": bad row " + std::to_string(row));
    }
    if (d.label != 0 && d.label != 1) {
      throw StructuralError(path.string() + ": label must be 0 or 1 at row " +
                            std::to_string(row));
    }
    out.push_back(d);
  }
  return out;
}

std::vector<Board> read_ttt_csv(const std::filesystem::path& path) {
  std::vector<Board> out;
  std::size_t row = 1;
  for (const auto& cells : read_rows(path, "g0,g1,g2,g3,g4,g5,g6,g7,g8,label")) {
    ++row;
    if (cells.size() != 10) {
      throw StructuralError(path.string() + ": bad row " + std::to_string(row));
    }
    Board b;
    int label = -1;
    try {
      for (std::size_t q = 0; q < 9; ++q) b.cells[q] = std::stoi(cells[q]);
      label = std::stoi(cells[9]);
    } catch (const std::logic_error&) {
      throw StructuralError(path.string() + ": bad row " + std::to_string(row));
    }
    if (label < 0 || label > 2) {
      throw StructuralError(path.string() + ": label must be 0, 1 or 2 at row " +
                            std::to_string(row));
    }
    b.label = static_cast<Winner>(label);
    if (board_winner(b.cells) != b.label) {
      throw StructuralError(path.string() + ": label disagrees with board at row " +
                            std::to_string(row));
    }
    out.push_back(b);
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, std::string_view task,
                    int n, std::uint64_t seed, const std::string& data_file,
                    const std::vector<int>& class_counts) {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["n"] = n;
  j["seed"] = seed;
  j["generator"] = Rng::kName;
  j["file"] = data_file;
  j["class_counts"] = class_counts;
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

}  // namespace qallab
