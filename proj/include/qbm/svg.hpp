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

// Minimal self-contained SVG charts.

#pragma once

#include "qbm/target.hpp"

#include <string>
#include <vector>

namespace qbm::svg {

/// Line chart of `mean` with a shaded mean +- std band, plus the moving
/// average and running minimum.
std::string curve_chart(const std::string& title, const std::vector<double>& mean, const std::vector<double>& std,
                        const std::vector<double>& mavg, const std::vector<double>& min);

struct GridPanel {
  std::string title;
  target::GridCells cells;
};

/// Panels stacked vertically, black cells filled.
std::string grid_panels(const std::vector<GridPanel>& panels);

}  // namespace qbm::svg
