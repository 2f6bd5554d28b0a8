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

#include "qbm/svg.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace qbm::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return buf.data();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string curve_chart(const std::string& title, const std::vector<double>& mean, const std::vector<double>& std,
                        const std::vector<double>& mavg, const std::vector<double>& min) {
  double hi = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) hi = std::max(hi, mean[i] + std[i]);
  if (hi <= 0.0) hi = 1.0;
  const double last = mean.size() > 1 ? static_cast<double>(mean.size() - 1) : 1.0;
  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  auto x = [&](std::size_t i) { return kMargin + plot_w * static_cast<double>(i) / last; };
  auto y = [&](double v) { return kHeight - kMargin - plot_h * std::clamp(v / hi, 0.0, 1.0); };
  auto polyline = [&](const std::vector<double>& v, const char* color, const char* dash) {
    std::string pts;
    for (std::size_t i = 0; i < v.size(); ++i) pts += num(x(i)) + "," + num(y(v[i])) + " ";
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"" +
           (dash[0] ? " stroke-dasharray=\"" + std::string(dash) + "\"" : std::string()) + " points=\"" + pts +
           "\"/>\n";
  };

  std::string band;
  for (std::size_t i = 0; i < mean.size(); ++i) band += num(x(i)) + "," + num(y(mean[i] + std[i])) + " ";
  for (std::size_t i = mean.size(); i-- > 0;) band += num(x(i)) + "," + num(y(mean[i] - std[i])) + " ";

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kMargin) + "\" y=\"25\">" + escape(title) + "</text>\n";
  out += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" + num(kWidth - kMargin) +
         "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) + "\" y2=\"" +
         num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"5\" y=\"" + num(kMargin + 4) + "\">" + num(hi) + "</text>\n";
  out += "<text x=\"5\" y=\"" + num(kHeight - kMargin + 4) + "\">0</text>\n";
  out += "<text x=\"" + num(kWidth - kMargin - 20) + "\" y=\"" + num(kHeight - kMargin + 20) + "\">" +
         std::to_string(mean.empty() ? 0 : mean.size() - 1) + "</text>\n";
  if (!mean.empty()) {
    out += "<polygon fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\" points=\"" + band + "\"/>\n";
    out += polyline(mean, "#1f77b4", "");
    out += polyline(mavg, "#ff7f0e", "6,3");
    out += polyline(min, "#2ca02c", "2,2");
  }
  const std::array<std::pair<const char*, const char*>, 3> legend{
      {{"raw (mean)", "#1f77b4"}, {"moving average", "#ff7f0e"}, {"minimum", "#2ca02c"}}};
  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double ly = kMargin + 15.0 * static_cast<double>(i);
    out += "<line x1=\"" + num(kWidth - 190) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kWidth - 170) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + legend[i].second + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + num(kWidth - 165) + "\" y=\"" + num(ly + 4) + "\">" + legend[i].first + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string grid_panels(const std::vector<GridPanel>& panels) {
  constexpr double cell = 12.0;
  constexpr double title_h = 18.0;
  const double panel_h = title_h + cell * target::kGridRows + 12.0;
  const double width = cell * target::kGridCols + 20.0;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                    num(panel_h * static_cast<double>(panels.size())) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double top = panel_h * static_cast<double>(p);
    out += "<text x=\"10\" y=\"" + num(top + 13) + "\">" + escape(panels[p].title) + "</text>\n";
    for (int r = 0; r < target::kGridRows; ++r) {
      for (int c = 0; c < target::kGridCols; ++c) {
        out += "<rect x=\"" + num(10 + cell * c) + "\" y=\"" + num(top + title_h + cell * r) + "\" width=\"" +
               num(cell) + "\" height=\"" + num(cell) + "\" fill=\"" +
               (panels[p].cells(r, c) ? "black" : "white") + "\" stroke=\"#ccc\"/>\n";
      }
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qbm::svg
