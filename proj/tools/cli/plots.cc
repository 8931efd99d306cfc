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

#include "cli/plots.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vlafreeze/error.h"

namespace vlafreeze::cli {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(w) +
         "\" height=\"" + Num(h) + "\" viewBox=\"0 0 " + Num(w) + " " + Num(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string Text(double x, double y, const std::string& s,
                 const std::string& extra = "") {
  return "<text x=\"" + Num(x) + "\" y=\"" + Num(y) + "\"" +
         (extra.empty() ? "" : " " + extra) + ">" + Escape(s) + "</text>\n";
}

// Lerp of a white-to-dark-red ramp.
std::string RampColor(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - t * (255 - 165)));
  const int g = static_cast<int>(std::lround(245 - t * 245));
  const int b = static_cast<int>(std::lround(240 - t * 202));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string RenderLinePlot(const LinePlot& plot) {
  double x_min = 0, x_max = 1;
  bool first = true;
  for (const auto& s : plot.series) {
    for (double x : s.x) {
      x_min = first ? x : std::min(x_min, x);
      x_max = first ? x : std::max(x_max, x);
      first = false;
    }
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double y_span = plot.y_max > plot.y_min ? plot.y_max - plot.y_min : 1.0;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) {
    return kTop + ph - (std::clamp(y, plot.y_min, plot.y_max) - plot.y_min) /
                           y_span * ph;
  };

  std::string svg = Header(kWidth, kHeight);
  svg += Text(kWidth / 2, 22, plot.title,
              "text-anchor=\"middle\" font-size=\"15\"");
  // Axes and grid.
  for (int i = 0; i <= 5; ++i) {
    const double v = plot.y_min + y_span * i / 5.0;
    svg += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(py(v)) + "\" x2=\"" +
           Num(kLeft + pw) + "\" y2=\"" + Num(py(v)) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += Text(kLeft - 8, py(v) + 4, Tick(v), "text-anchor=\"end\"");
  }
  std::vector<double> ticks;
  for (const auto& s : plot.series) ticks.insert(ticks.end(), s.x.begin(), s.x.end());
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double t : ticks) {
    svg += Text(px(t), kTop + ph + 18, Tick(t), "text-anchor=\"middle\"");
  }
  svg += "<rect x=\"" + Num(kLeft) + "\" y=\"" + Num(kTop) + "\" width=\"" +
         Num(pw) + "\" height=\"" + Num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += Text(kLeft + pw / 2, kHeight - 18, plot.x_label, "text-anchor=\"middle\"");
  svg += Text(18, kTop + ph / 2, plot.y_label,
              "text-anchor=\"middle\" transform=\"rotate(-90 18 " +
                  Num(kTop + ph / 2) + ")\"");

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const std::string color = kPalette[si % std::size(kPalette)];
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!s.y[i]) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? "L" : "M") + Num(px(s.x[i])) + " " + Num(py(*s.y[i])) + " ";
      pen_down = true;
      svg += "<circle cx=\"" + Num(px(s.x[i])) + "\" cy=\"" + Num(py(*s.y[i])) +
             "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
    }
    if (!path.empty()) {
      path.pop_back();
      svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    }
    const double ly = kTop + 16 + 18 * static_cast<double>(si);
    svg += "<line x1=\"" + Num(kLeft + pw + 12) + "\" y1=\"" + Num(ly - 4) +
           "\" x2=\"" + Num(kLeft + pw + 32) + "\" y2=\"" + Num(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += Text(kLeft + pw + 38, ly, s.name);
  }
  svg += "</svg>\n";
  return svg;
}

std::string RenderHeatmap(const Heatmap& map) {
  const std::size_t rows = map.values.size();
  const std::size_t cols = rows == 0 ? 0 : map.values[0].size();
  const double cell = 48;
  const double left = 110, top = 50;
  const double w = left + cell * static_cast<double>(cols) + 90;
  const double h = top + cell * static_cast<double>(rows) + 60;
  const double span = map.v_max > map.v_min ? map.v_max - map.v_min : 1.0;

  std::string svg = Header(w, h);
  svg += "<defs><pattern id=\"missing\" width=\"6\" height=\"6\" "
         "patternUnits=\"userSpaceOnUse\"><path d=\"M0 6 L6 0\" "
         "stroke=\"#bbbbbb\"/></pattern></defs>\n";
  svg += Text(w / 2, 22, map.title, "text-anchor=\"middle\" font-size=\"15\"");
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = top + cell * static_cast<double>(r);
    if (r < map.row_ticks.size()) {
      svg += Text(left - 8, y + cell / 2 + 4, map.row_ticks[r], "text-anchor=\"end\"");
    }
    for (std::size_t c = 0; c < cols && c < map.values[r].size(); ++c) {
      const double x = left + cell * static_cast<double>(c);
      const auto& v = map.values[r][c];
      const std::string fill =
          v ? RampColor((*v - map.v_min) / span) : std::string("url(#missing)");
      svg += "<rect x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" width=\"" +
             Num(cell) + "\" height=\"" + Num(cell) + "\" fill=\"" + fill +
             "\" stroke=\"white\"/>\n";
      if (v) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.1f", *v);
        const bool dark = (*v - map.v_min) / span > 0.55;
        svg += Text(x + cell / 2, y + cell / 2 + 4, buf,
                    std::string("text-anchor=\"middle\" font-size=\"11\" fill=\"") +
                        (dark ? "white" : "black") + "\"");
      }
    }
  }
  for (std::size_t c = 0; c < cols && c < map.column_ticks.size(); ++c) {
    svg += Text(left + cell * (static_cast<double>(c) + 0.5),
                top + cell * static_cast<double>(rows) + 18, map.column_ticks[c],
                "text-anchor=\"middle\"");
  }
  svg += Text(left + cell * static_cast<double>(cols) / 2, h - 14,
              map.column_label, "text-anchor=\"middle\"");
  svg += Text(16, top + cell * static_cast<double>(rows) / 2, map.row_label,
              "text-anchor=\"middle\" transform=\"rotate(-90 16 " +
                  Num(top + cell * static_cast<double>(rows) / 2) + ")\"");
  svg += "</svg>\n";
  return svg;
}

std::string AxisDisplayName(const std::string& axis) {
  if (axis == "epsilon") return "epsilon (x/255)";
  if (axis == "step_size") return "step_size (x/255)";
  if (axis == "prompt_count") return "reference prompts N";
  if (axis == "outer_steps") return "outer steps K";
  if (axis == "inner_steps") return "inner steps M";
  return axis;
}

double AxisDisplayValue(const std::string& axis, double value) {
  if (axis == "epsilon" || axis == "step_size") {
    return std::round(value * 255.0 * 1e6) / 1e6;
  }
  return value;
}

std::string RenderSweepGrid(const SweepGrid& grid, const std::string& title) {
  const auto& axes = grid.axes();
  if (axes.size() == 1) {
    LinePlot plot;
    plot.title = title;
    plot.x_label = AxisDisplayName(axes[0].name);
    PlotSeries s;
    s.name = "ASR";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      s.x.push_back(AxisDisplayValue(axes[0].name, axes[0].values[i]));
      s.y.push_back(grid.cell(i));
    }
    plot.series.push_back(std::move(s));
    return RenderLinePlot(plot);
  }
  if (axes.size() == 2) {
    Heatmap map;
    map.title = title;
    map.row_label = AxisDisplayName(axes[0].name);
    map.column_label = AxisDisplayName(axes[1].name);
    for (double v : axes[0].values) {
      map.row_ticks.push_back(Tick(AxisDisplayValue(axes[0].name, v)));
    }
    for (double v : axes[1].values) {
      map.column_ticks.push_back(Tick(AxisDisplayValue(axes[1].name, v)));
    }
    map.values.assign(axes[0].values.size(),
                      std::vector<std::optional<double>>(axes[1].values.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.Unflatten(i);
      map.values[idx[0]][idx[1]] = grid.cell(i);
    }
    return RenderHeatmap(map);
  }
  Fail(ErrorCode::kValidation, "plots cover 1-D and 2-D grids only, got " +
                                   std::to_string(axes.size()) + " axes");
}

std::string SweepGridCsv(const SweepGrid& grid) {
  std::string out;
  for (const auto& axis : grid.axes()) out += AxisDisplayName(axis.name) + ",";
  out += "asr_percent\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto coords = grid.Coordinates(i);
    for (std::size_t a = 0; a < coords.size(); ++a) {
      out += Tick(AxisDisplayValue(grid.axes()[a].name, coords[a])) + ",";
    }
    if (grid.cell(i)) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f", *grid.cell(i));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace vlafreeze::cli
