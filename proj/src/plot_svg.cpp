// Copyright 2026 The JouleTrace Authors
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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "jouletrace/analysis.hpp"

namespace jouletrace {

namespace {

constexpr double kWidth = 880;
constexpr double kHeight = 520;
constexpr double kLeft = 72;
constexpr double kRight = 200;  // room for the legend
constexpr double kTop = 32;
constexpr double kBottom = 64;

const char* kPalette[] = {"#4477AA", "#EE6677", "#228833", "#CCBB44",
                          "#66CCEE", "#AA3377", "#BBBBBB"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string coord(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

std::string tick_label(double v) {
  std::ostringstream out;
  out << std::setprecision(4) << v;
  return out.str();
}

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
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

std::string sibling_data_path(const std::string& svg_path) {
  const auto slash = svg_path.find_last_of("/\\");
  const auto dot = svg_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return svg_path + ".csv";
  }
  return svg_path.substr(0, dot) + ".csv";
}

}  // namespace

void emit_plot(const LabeledCurves& curves, const std::string& svg_path) {
  if (curves.empty()) throw std::invalid_argument("plot requires at least one curve");

  std::size_t max_len = 0;
  double y_max = 0.0;
  for (const auto& [label, curve] : curves) {
    max_len = std::max(max_len, curve.length);
    for (std::size_t i = 0; i < curve.length; ++i) {
      y_max = std::max({y_max, curve.mean[i], curve.q3[i]});
    }
  }
  if (max_len == 0) throw std::invalid_argument("plot requires non-empty curves");
  y_max = y_max > 0 ? y_max * 1.05 : 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_span = max_len > 1 ? static_cast<double>(max_len - 1) : 1.0;
  const auto x_of = [&](std::size_t i) {
    return kLeft + plot_w * static_cast<double>(i) / x_span;
  };
  const auto y_of = [&](double watts) { return kTop + plot_h * (1.0 - watts / y_max); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // Grid and axis ticks.
  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double frac = static_cast<double>(t) / kTicks;
    const double y = kTop + plot_h * (1.0 - frac);
    svg << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(y) << "\" x2=\""
        << coord(kLeft + plot_w) << "\" y2=\"" << coord(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << coord(kLeft - 8) << "\" y=\"" << coord(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(frac * y_max) << "</text>\n";
    const double x = kLeft + plot_w * frac;
    const double index_at = frac * x_span;
    svg << "<text x=\"" << coord(x) << "\" y=\"" << coord(kTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(std::round(index_at)) << "</text>\n";
  }
  svg << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(kTop) << "\" x2=\""
      << coord(kLeft) << "\" y2=\"" << coord(kTop + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << coord(kLeft) << "\" y1=\"" << coord(kTop + plot_h) << "\" x2=\""
      << coord(kLeft + plot_w) << "\" y2=\"" << coord(kTop + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // Axis titles.
  svg << "<text x=\"" << coord(kLeft + plot_w / 2) << "\" y=\"" << coord(kHeight - 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << "time (sample index)</text>\n";
  svg << "<text x=\"18\" y=\"" << coord(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(-90 18 " << coord(kTop + plot_h / 2) << ")\">"
      << "power (W)</text>\n";

  // Interquartile bands first so every mean line stays visible.
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c].second;
    if (curve.length == 0) continue;
    const char* color = kPalette[c % kPaletteSize];
    svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < curve.length; ++i) {
      svg << coord(x_of(i)) << "," << coord(y_of(curve.q3[i])) << " ";
    }
    for (std::size_t i = curve.length; i-- > 0;) {
      svg << coord(x_of(i)) << "," << coord(y_of(curve.q1[i]));
      if (i > 0) svg << " ";
    }
    svg << "\"/>\n";
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& curve = curves[c].second;
    if (curve.length == 0) continue;
    const char* color = kPalette[c % kPaletteSize];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.length; ++i) {
      svg << coord(x_of(i)) << "," << coord(y_of(curve.mean[i]));
      if (i + 1 < curve.length) svg << " ";
    }
    svg << "\"/>\n";
  }

  // Legend.
  const double legend_x = kLeft + plot_w + 16;
  double legend_y = kTop + 8;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % kPaletteSize];
    svg << "<line x1=\"" << coord(legend_x) << "\" y1=\"" << coord(legend_y) << "\" x2=\""
        << coord(legend_x + 24) << "\" y2=\"" << coord(legend_y) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << coord(legend_x + 30) << "\" y=\"" << coord(legend_y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(curves[c].first)
        << "</text>\n";
    legend_y += 20;
  }
  svg << "</svg>\n";

  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + svg_path + " for writing");
  out << svg.str();
  out.flush();
  if (!out) throw std::runtime_error("write to " + svg_path + " failed");

  const std::string data_path = sibling_data_path(svg_path);
  std::ofstream data(data_path, std::ios::binary);
  if (!data) throw std::runtime_error("cannot open " + data_path + " for writing");
  write_aggregate_csv(data, curves);
  data.flush();
  if (!data) throw std::runtime_error("write to " + data_path + " failed");
}

}  // namespace jouletrace
