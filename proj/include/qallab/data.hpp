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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qallab {

struct DonutSample {
  double x0 = 0.0;
  double x1 = 0.0;
  int label = 0;
};

/// Ground truth for a sample generated at polar angle theta.
int donut_label(double theta);

/// r ~ N(0.5, 0.15), theta ~ U[0, 2 pi), labelled by the sign of
/// cos(2 theta + 0.58). Two normal-variate uniforms are drawn before theta
/// for every sample.
std::vector<DonutSample> gen_donut(int n, std::uint64_t seed);

/// Tic-tac-toe classes; the value is also the class index.
enum class Winner { Circle = 0, Draw = 1, Cross = 2 };

std::string_view to_string(Winner w);

/// Cells are +1 (cross), -1 (circle) or 0 (empty), row-major.
using BoardCells = std::array<int, 9>;

struct Board {
  BoardCells cells{};
  Winner label = Winner::Draw;
};

/// Winner by the line rule. Throws StructuralError when both players own a
/// line or a cell value is invalid.
Winner board_winner(const BoardCells& cells);

/// Applies a cell permutation: out[images[i]] = cells[i].
BoardCells permute_board(const BoardCells& cells, const std::vector<int>& images);

/// Plays uniformly random legal games (cross first) to completion and keeps
/// the first `n` distinct final boards.
std::vector<Board> gen_ttt(int n, std::uint64_t seed);

/// Feature matrix plus integer class labels.
struct Dataset {
  std::string task;
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  Eigen::Index size() const { return features.rows(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }

  /// Rows selected by `ids`, in order.
  Dataset subset(const std::vector<int>& ids) const;
};

Dataset to_dataset(const std::vector<DonutSample>& samples);
/// `binary` drops drawn boards and relabels circle -> 0, cross -> 1.
Dataset to_dataset(const std::vector<Board>& boards, bool binary);

struct SplitDataset {
  std::vector<int> pool;
  std::vector<int> validation;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

/// Random permutation then contiguous 3:1:1 slicing; validation and test get
/// floor(n/5) each, the remainder goes to the pool.
SplitDataset split(std::size_t n_samples, std::uint64_t seed);

void write_donut_csv(const std::filesystem::path& path,
                     const std::vector<DonutSample>& samples);
void write_ttt_csv(const std::filesystem::path& path,
                   const std::vector<Board>& boards);
std::vector<DonutSample> read_donut_csv(const std::filesystem::path& path);
std::vector<Board> read_ttt_csv(const std::filesystem::path& path);

/// JSON manifest describing a generated dataset file.
void write_manifest(const std::filesystem::path& path, std::string_view task,
                    int n, std::uint64_t seed, const std::string& data_file,
                    const std::vector<int>& class_counts);

}  // namespace qallab
