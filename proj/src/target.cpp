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

#include "qbm/target.hpp"

#include "qbm/ising.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qbm::target {

TargetDistribution::TargetDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  const Eigen::Index dim = probs_.size();
  while ((Eigen::Index{1} << n_qubits_) < dim) ++n_qubits_;
  if (dim < 2 || (Eigen::Index{1} << n_qubits_) != dim) throw TargetError("target length must be 2^N");
  if ((probs_.array() < 0.0).any()) throw TargetError("target probabilities must be nonnegative");
  if (std::abs(probs_.sum() - 1.0) > 1e-12) throw TargetError("target probabilities must sum to 1");
}

TargetDistribution one_point(std::string_view bits, int n) {
  if (static_cast<int>(bits.size()) != n) throw TargetError("bitstring length must equal N");
  std::size_t index = 0;
  try {
    index = ising::bitstring_to_index(bits);
  } catch (const ising::IsingError& e) {
    throw TargetError(e.what());
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  probs(static_cast<Eigen::Index>(index)) = 1.0;
  return TargetDistribution(std::move(probs));
}

Eigen::VectorXi onehot_encode(std::string_view bits) {
  if (bits.size() != 4) throw TargetError("one-hot encoding takes a 4-bit value");
  Eigen::Index value = 0;
  one_point(bits, 4).probs().maxCoeff(&value);
  Eigen::VectorXi printed = Eigen::VectorXi::Zero(16);
  printed(15 - value) = 1;
  return printed;
}

std::string onehot_decode(const Eigen::Ref<const Eigen::VectorXi>& printed) {
  if (printed.size() != 16 || printed.sum() != 1 || (printed.array() < 0).any() ||
      (printed.array() > 1).any()) {
    throw TargetError("not a 16-component one-hot vector");
  }
  Eigen::Index pos = 0;
  printed.maxCoeff(&pos);
  return ising::index_to_bitstring(static_cast<std::size_t>(15 - pos), 4);
}

std::string onehot_to_string(const Eigen::Ref<const Eigen::VectorXi>& printed) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < printed.size(); ++i) out += static_cast<char>('0' + printed(i));
  return out + "]";
}

GridImage load_grid(std::string_view text) {
  GridImage img;
  int row = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string cells;
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      if (c != '0' && c != '1') throw TargetError(std::string("illegal grid character '") + c + "'");
      cells += c;
    }
    if (cells.empty()) continue;
    if (row >= kGridRows) throw TargetError("grid has more than 8 rows");
    if (static_cast<int>(cells.size()) != kGridCols) {
      throw TargetError("grid row " + std::to_string(row + 1) + " has " + std::to_string(cells.size()) +
                        " cells, expected 20");
    }
    for (int c = 0; c < kGridCols; ++c) img.cells(row, c) = cells[static_cast<std::size_t>(c)] - '0';
    ++row;
  }
  if (row != kGridRows) throw TargetError("grid has " + std::to_string(row) + " rows, expected 8");
  return img;
}

GridImage load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TargetError("cannot open grid file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_grid(buf.str());
}

std::string render_grid(const GridImage& img) {
  std::string out;
  for (int r = 0; r < kGridRows; ++r) {
    for (int c = 0; c < kGridCols; ++c) out += static_cast<char>('0' + img.cells(r, c));
    out += '\n';
  }
  return out;
}

BlockPlan decompose(const GridImage& img) {
  BlockPlan plan;
  plan.reserve(kBlockCount);
  for (int r = 0; r < kGridRows; r += 2) {
    for (int c = 0; c < kGridCols; c += 2) {
      Block b{r, c, ""};
      for (int dr = 0; dr < 2; ++dr) {
        for (int dc = 0; dc < 2; ++dc) b.bits += static_cast<char>('0' + img.cells(r + dr, c + dc));
      }
      plan.push_back(std::move(b));
    }
  }
  return plan;
}

TargetDistribution block_target(const Block& block) { return one_point(block.bits, 4); }

GridImage assemble(const std::vector<std::string>& block_bits) {
  if (static_cast<int>(block_bits.size()) != kBlockCount) {
    throw TargetError("expected 40 blocks, got " + std::to_string(block_bits.size()));
  }
  GridImage img;
  std::size_t k = 0;
  for (int r = 0; r < kGridRows; r += 2) {
    for (int c = 0; c < kGridCols; c += 2, ++k) {
      const std::string& bits = block_bits[k];
      if (bits.size() != 4 || bits.find_first_not_of("01") != std::string::npos) {
        throw TargetError("block bitstring must be four '0'/'1' characters");
      }
      for (int q = 0; q < 4; ++q) img.cells(r + q / 2, c + q % 2) = bits[static_cast<std::size_t>(q)] - '0';
    }
  }
  return img;
}

}  // namespace qbm::target
