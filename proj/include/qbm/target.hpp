// Copyright 2026 The qbm Authors
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

// Target distributions, the printed one-hot encoding, and the 8x20 grid
// image split into 2x2 blocks.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbm::target {

class TargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probability vector over the 2^N basis indices.
class TargetDistribution {
 public:
  explicit TargetDistribution(Eigen::VectorXd probs);

  const Eigen::VectorXd& probs() const { return probs_; }
  int n_qubits() const { return n_qubits_; }
  Eigen::Index size() const { return probs_.size(); }
  double operator[](Eigen::Index i) const { return probs_(i); }

 private:
  Eigen::VectorXd probs_;
  int n_qubits_ = 0;
};

/// All mass on the basis state spelled by `bits` (qubit 1 first).
TargetDistribution one_point(std::string_view bits, int n);

/// 16-component one-hot vector in printed order: component 0 is the
/// leftmost printed digit and stands for value 15, so value v sits at
/// position 15 - v.
Eigen::VectorXi onehot_encode(std::string_view bits);
std::string onehot_decode(const Eigen::Ref<const Eigen::VectorXi>& printed);
/// "[0000001000000000]" style rendering.
std::string onehot_to_string(const Eigen::Ref<const Eigen::VectorXi>& printed);

inline constexpr int kGridRows = 8;
inline constexpr int kGridCols = 20;
inline constexpr int kBlockCount = (kGridRows / 2) * (kGridCols / 2);

/// Binary 8x20 image, 0 = white, 1 = black.
using GridCells = Eigen::Matrix<int, kGridRows, kGridCols>;

struct GridImage {
  GridCells cells = GridCells::Zero();

  int black_count() const { return cells.sum(); }
  friend bool operator==(const GridImage& a, const GridImage& b) { return a.cells == b.cells; }
};

/// 8 non-blank lines of 20 '0'/'1' characters; other whitespace ignored.
GridImage load_grid(std::string_view text);
GridImage load_grid_file(const std::string& path);
std::string render_grid(const GridImage& img);

/// One 2x2 block; `bits` lists (top-left, top-right, bottom-left,
/// bottom-right) as qubits 1..4.
struct Block {
  int row = 0;  // origin cell
  int col = 0;
  std::string bits;
};

/// Blocks in left-to-right, then top-to-bottom order.
using BlockPlan = std::vector<Block>;

BlockPlan decompose(const GridImage& img);
TargetDistribution block_target(const Block& block);
/// Rebuilds the image from per-block bitstrings given in plan order.
GridImage assemble(const std::vector<std::string>& block_bits);

}  // namespace qbm::target
