/*
 * Copyright 2026 The MVICAD Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "mvicad/csv.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mvicad {

enum class PlotKind { line, scatter };

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// One polyline (with point markers) per series, plus a legend.
std::string render_line_plot(const std::vector<LineSeries>& series, const PlotLabels& labels);

/// One circle per point and the least-squares line y = slope x + intercept.
std::string render_scatter_plot(const std::vector<double>& x, const std::vector<double>& y,
                                double slope, double intercept, const PlotLabels& labels);

/// Renders a benchmark CSV as SVG. `line` expects the Amari summary columns
/// (delay_level, algorithm, mean_amari); `scatter` expects the delay scatter
/// columns (true_delay_centered, est_delay_centered). Returns the SVG text.
std::string render_plot(const CsvTable& rows, PlotKind kind);

void emit_plot(const CsvTable& rows, PlotKind kind, const std::filesystem::path& file);

}  // namespace mvicad
