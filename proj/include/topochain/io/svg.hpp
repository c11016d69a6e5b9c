#ifndef TOPOCHAIN_IO_SVG_HPP
#define TOPOCHAIN_IO_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "topochain/errors.hpp"
#include "topochain/io/csv.hpp"

namespace topochain::io {

enum class PlotKind { line, heatmap };

namespace svgdetail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;

inline const char* series_color(size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[i % 10];
}

// Linear blue-white-red map for values in [lo, hi].
inline std::string diverging_color(double v, double lo, double hi) {
  double x = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
  x = std::clamp(x, 0.0, 1.0);
  int r, g, b;
  if (x < 0.5) {
    const double s = x / 0.5;
    r = static_cast<int>(std::lround(49 + s * (255 - 49)));
    g = static_cast<int>(std::lround(54 + s * (255 - 54)));
    b = static_cast<int>(std::lround(149 + s * (255 - 149)));
  } else {
    const double s = (x - 0.5) / 0.5;
    r = static_cast<int>(std::lround(255 + s * (165 - 255)));
    g = static_cast<int>(std::lround(255 + s * (0 - 255)));
    b = static_cast<int>(std::lround(255 + s * (38 - 255)));
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  static Axis of(const std::vector<double>& values) {
    Axis a{values.front(), values.front()};
    for (double v : values) a.expand(v);
    if (a.hi == a.lo) {
      a.lo -= 0.5;
      a.hi += 0.5;
    }
    return a;
  }
};

inline void draw_frame_and_ticks(std::string& svg, const Axis& x, const Axis& y,
                                 const std::string& x_label) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = kLeft + pw * i / 5.0;
    const double vx = x.lo + (x.hi - x.lo) * i / 5.0;
    svg += "<line x1=\"" + num(fx) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(fx) +
           "\" y2=\"" + num(kTop + ph + 5) + "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + num(fx) + "\" y=\"" + num(kTop + ph + 20) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + tick_label(vx) + "</text>\n";
    const double fy = kTop + ph - ph * i / 5.0;
    const double vy = y.lo + (y.hi - y.lo) * i / 5.0;
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(fy) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(fy) + "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(fy + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + tick_label(vy) + "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" font-size=\"12\" text-anchor=\"middle\">" + x_label + "</text>\n";
}

}  // namespace svgdetail

/// Line plot: column 0 is the abscissa, every further column one series.
inline std::string render_line_plot(const Table& table) {
  using namespace svgdetail;
  if (table.empty() || table.width() < 2)
    throw ConfigError("render_line_plot: need a non-empty table with >= 2 columns");
  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    xs.push_back(row[0]);
    for (int c = 1; c < table.width(); ++c) ys.push_back(row[c]);
  }
  const Axis x = Axis::of(xs), y = Axis::of(ys);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const auto map_x = [&](double v) { return kLeft + (v - x.lo) / (x.hi - x.lo) * pw; };
  const auto map_y = [&](double v) { return kTop + ph - (v - y.lo) / (y.hi - y.lo) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                    "\" height=\"" + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  draw_frame_and_ticks(svg, x, y, table.columns[0]);
  for (int c = 1; c < table.width(); ++c) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += series_color(c - 1);
    svg += "\" stroke-width=\"1.2\" points=\"";
    for (const auto& row : table.rows)
      svg += num(map_x(row[0])) + "," + num(map_y(row[c])) + " ";
    svg += "\"/>\n";
  }
  // Legend only when it stays readable.
  if (table.width() <= 9) {
    for (int c = 1; c < table.width(); ++c) {
      const double ly = kTop + 14.0 * c;
      svg += "<rect x=\"" + num(kWidth - kRight - 120) + "\" y=\"" + num(ly - 9) +
             "\" width=\"10\" height=\"10\" fill=\"" + series_color(c - 1) + "\"/>\n";
      svg += "<text x=\"" + num(kWidth - kRight - 106) + "\" y=\"" + num(ly) +
             "\" font-size=\"11\">" + table.columns[c] + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

/// Heat map: column 0 is the sweep/time variable, the remaining columns are
/// lattice sites 1..2L drawn bottom to top.
inline std::string render_heatmap(const Table& table) {
  using namespace svgdetail;
  if (table.empty() || table.width() < 2)
    throw ConfigError("render_heatmap: need a non-empty table with >= 2 columns");
  const int n_sites = table.width() - 1;
  const int n_rows = static_cast<int>(table.rows.size());
  double lo = table.rows[0][1], hi = lo;
  for (const auto& row : table.rows)
    for (int c = 1; c < table.width(); ++c) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double cw = pw / n_rows, chh = ph / n_sites;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                    "\" height=\"" + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (int r = 0; r < n_rows; ++r) {
    for (int s = 0; s < n_sites; ++s) {
      const double vx = kLeft + cw * r;
      const double vy = kTop + ph - chh * (s + 1);
      svg += "<rect x=\"" + num(vx) + "\" y=\"" + num(vy) + "\" width=\"" + num(cw + 0.5) +
             "\" height=\"" + num(chh + 0.5) + "\" fill=\"" +
             diverging_color(table.rows[r][s + 1], lo, hi) + "\"/>\n";
    }
  }
  const Axis x{table.rows.front()[0], table.rows.back()[0]};
  const Axis y{1.0, static_cast<double>(n_sites)};
  draw_frame_and_ticks(svg, x, y, table.columns[0]);
  svg += "</svg>\n";
  return svg;
}

/// Standalone deterministic vector-graphics emitter.
inline void emit_plot(const Table& table, PlotKind kind, const std::filesystem::path& path) {
  if (table.empty()) throw ConfigError("emit_plot: empty table");
  const std::string svg =
      (kind == PlotKind::line) ? render_line_plot(table) : render_heatmap(table);
  write_file_atomic(path, svg);
}

}  // namespace topochain::io

#endif
