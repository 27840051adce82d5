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

#include "mvicad/plot.hpp"

#include "mvicad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mvicad {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct Range {
  double lo, hi;
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}

  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void frame(const PlotLabels& labels) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out_ << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
         << escape(labels.title) << "</text>\n";
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    out_ << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    out_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0) << "\"/>\n";
    out_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1) << "\"/>\n";
    out_ << "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x_.lo + (x_.hi - x_.lo) * k / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * k / 4.0;
      out_ << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
      out_ << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
    }
    out_ << "</g>\n";
    out_ << "<text class=\"xlabel\" x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 18)
         << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(labels.x_label) << "</text>\n";
    out_ << "<text class=\"ylabel\" x=\"18\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
         << num((y0 + y1) / 2) << ")\">" << escape(labels.y_label) << "</text>\n";
  }

  std::ostringstream& out() { return out_; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  Range x_, y_;
  std::ostringstream out_;
};

template <class Vec>
void bounds(const Vec& v, double& lo, double& hi) {
  for (double d : v) {
    if (!std::isfinite(d)) continue;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

}  // namespace

std::string render_line_plot(const std::vector<LineSeries>& series, const PlotLabels& labels) {
  if (series.empty()) throw DataError(DataError::Kind::validation, "nothing to plot");
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || s.x.empty())
      throw DataError(DataError::Kind::validation, "series '" + s.name + "' is empty or ragged");
    bounds(s.x, xlo, xhi);
    bounds(s.y, ylo, yhi);
  }
  if (!std::isfinite(xlo) || !std::isfinite(ylo))
    throw DataError(DataError::Kind::validation, "no finite points to plot");
  Canvas c(padded(xlo, xhi), padded(std::min(ylo, 0.0), yhi));
  c.frame(labels);
  auto& out = c.out();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t t = 0; t < s.x.size(); ++t) {
      if (!std::isfinite(s.y[t])) continue;
      out << (t ? " " : "") << num(c.px(s.x[t])) << ',' << num(c.py(s.y[t]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << num(kWidth - kRight - 100) << "\" y=\"" << num(kTop + 16 * (k + 1))
        << "\" fill=\"" << color << "\" font-size=\"12\">" << escape(s.name) << "</text>\n";
  }
  return c.finish();
}

std::string render_scatter_plot(const std::vector<double>& x, const std::vector<double>& y, double slope,
                                double intercept, const PlotLabels& labels) {
  if (x.empty() || x.size() != y.size())
    throw DataError(DataError::Kind::validation, "scatter needs matching non-empty x and y");
  double lo = INFINITY, hi = -INFINITY;
  bounds(x, lo, hi);
  bounds(y, lo, hi);
  if (!std::isfinite(lo)) throw DataError(DataError::Kind::validation, "no finite points to plot");
  const Range r = padded(lo, hi);
  Canvas c(r, r);
  c.frame(labels);
  auto& out = c.out();
  out << "<g class=\"points\" fill=\"" << kPalette[0] << "\" fill-opacity=\"0.6\">\n";
  for (std::size_t k = 0; k < x.size(); ++k)
    out << "<circle cx=\"" << num(c.px(x[k])) << "\" cy=\"" << num(c.py(y[k])) << "\" r=\"3\"/>\n";
  out << "</g>\n";
  out << "<line class=\"fit\" stroke=\"" << kPalette[3] << "\" stroke-width=\"2\" x1=\"" << num(c.px(r.lo))
      << "\" y1=\"" << num(c.py(slope * r.lo + intercept)) << "\" x2=\"" << num(c.px(r.hi)) << "\" y2=\""
      << num(c.py(slope * r.hi + intercept)) << "\"/>\n";
  return c.finish();
}

std::string render_plot(const CsvTable& rows, PlotKind kind) {
  if (rows.rows.empty()) throw DataError(DataError::Kind::validation, "no rows to plot");
  if (kind == PlotKind::line) {
    const auto cl = rows.column("delay_level");
    const auto ca = rows.column("algorithm");
    const auto cv = rows.column("mean_amari");
    std::map<std::string, LineSeries> by_algo;
    for (const auto& r : rows.rows) {
      auto& s = by_algo[r[ca]];
      s.name = r[ca];
      s.x.push_back(parse_double(r[cl]));
      s.y.push_back(parse_double(r[cv]));
    }
    std::vector<LineSeries> series;
    for (auto& [name, s] : by_algo) series.push_back(std::move(s));
    return render_line_plot(series, {"Amari distance vs delay level", "delay level (samples)",
                                     "mean Amari distance"});
  }
  const auto cx = rows.column("true_delay_centered");
  const auto cy = rows.column("est_delay_centered");
  std::vector<double> x, y;
  for (const auto& r : rows.rows) {
    x.push_back(parse_double(r[cx]));
    y.push_back(parse_double(r[cy]));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  return render_scatter_plot(x, y, slope, my - slope * mx,
                             {"Estimated vs true delays", "true delay (centered)", "estimated delay (centered)"});
}

void emit_plot(const CsvTable& rows, PlotKind kind, const std::filesystem::path& file) {
  const std::string svg = render_plot(rows, kind);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataError::Kind::io, "cannot write " + file.string());
  out << svg;
}

}  // namespace mvicad
