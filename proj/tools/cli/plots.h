// Copyright 2026 The vlafreeze Authors
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

#ifndef VLAFREEZE_TOOLS_CLI_PLOTS_H_
#define VLAFREEZE_TOOLS_CLI_PLOTS_H_

#include <optional>
#include <string>
#include <vector>

#include "vlafreeze/eval.h"

namespace vlafreeze::cli {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<std::optional<double>> y;  // nullopt: gap in the line
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label = "ASR (%)";
  std::vector<PlotSeries> series;
  double y_min = 0.0;
  double y_max = 100.0;
};

// Standalone SVG. Points are plotted at their x value; missing y values
// break the line.
std::string RenderLinePlot(const LinePlot& plot);

struct Heatmap {
  std::string title;
  std::string row_label;
  std::string column_label;
  std::vector<std::string> row_ticks;
  std::vector<std::string> column_ticks;
  std::vector<std::vector<std::optional<double>>> values;  // [row][column]
  double v_min = 0.0;
  double v_max = 100.0;
};

// Standalone SVG. Missing cells are drawn blank with a hatched outline.
std::string RenderHeatmap(const Heatmap& map);

// Axis values as shown on plots and in CSV: budgets in units of 1/255.
std::string AxisDisplayName(const std::string& axis);
double AxisDisplayValue(const std::string& axis, double value);

// 1-D grids become a line plot, 2-D grids a heatmap (first axis on rows).
// Throws kValidation for grids of other rank.
std::string RenderSweepGrid(const SweepGrid& grid, const std::string& title);

// "axis_1,...,axis_k,asr_percent" rows in flat order; blank when missing.
std::string SweepGridCsv(const SweepGrid& grid);

}  // namespace vlafreeze::cli

#endif  // VLAFREEZE_TOOLS_CLI_PLOTS_H_
