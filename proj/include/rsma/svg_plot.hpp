#pragma once

// Renders a sweep CSV as a self-contained SVG: WSR-vs-SNR polylines when the
// file spans several SNR points, grouped bars for a single-SNR placement
// comparison. One series per (scheme, strategy); deterministic output bytes
// for identical input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsma/sweep.hpp"

namespace rsma {

struct PlotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct CsvRow {
  double snr_db = 0.0;
  std::string scheme, strategy;
  double r_th = 0.0;
  double mean_wsr = 0.0;
};

inline std::vector<CsvRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw PlotError("csv line 1: empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw PlotError("csv line 1: unexpected header '" + line + "'");
  std::vector<CsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw PlotError("csv line " + std::to_string(line_no) + ": expected 8 fields, got " +
                      std::to_string(fields.size()));
    CsvRow row;
    try {
      row.snr_db = std::stod(fields[0]);
      row.scheme = fields[1];
      row.strategy = fields[2];
      row.r_th = std::stod(fields[3]);
      row.mean_wsr = std::stod(fields[4]);
      (void)std::stod(fields[5]);
      (void)std::stod(fields[6]);
      (void)std::stoi(fields[7]);
    } catch (...) {
      throw PlotError("csv line " + std::to_string(line_no) + ": malformed numeric field");
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline const char* series_color(std::size_t index) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
                                   "#bcbd22", "#e377c2", "#aec7e8", "#98df8a"};
  return kPalette[index % (sizeof kPalette / sizeof kPalette[0])];
}

}  // namespace detail

inline std::string render_plot_svg(const std::string& csv_text) {
  const auto rows = detail::parse_sweep_csv(csv_text);

  // Series keyed by (scheme, strategy); the rate floor joins the key only
  // when several floors are present.
  std::map<double, bool> floors;
  for (const auto& r : rows) floors[r.r_th] = true;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::map<double, bool> snr_values;
  for (const auto& r : rows) {
    std::string key = r.scheme + " / " + r.strategy;
    if (floors.size() > 1) key += " / r_th=" + detail::format_g9(r.r_th);
    series[key].push_back({r.snr_db, r.mean_wsr});
    snr_values[r.snr_db] = true;
  }

  const double width = 800, height = 500;
  const double ml = 70, mr = 220, mt = 30, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (!rows.empty()) {
    x_min = snr_values.begin()->first;
    x_max = snr_values.rbegin()->first;
    y_max = 0;
    for (const auto& r : rows) y_max = std::max(y_max, r.mean_wsr);
    if (x_max == x_min) {
      x_min -= 1;
      x_max += 1;
    }
    if (y_max <= 0) y_max = 1;
    y_max *= 1.05;
  }
  auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double v) { return mt + ph - (v - y_min) / (y_max - y_min) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  // Axes.
  svg << "<line x1=\"" << detail::format_coord(ml) << "\" y1=\"" << detail::format_coord(mt + ph)
      << "\" x2=\"" << detail::format_coord(ml + pw) << "\" y2=\""
      << detail::format_coord(mt + ph) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << detail::format_coord(ml) << "\" y1=\"" << detail::format_coord(mt)
      << "\" x2=\"" << detail::format_coord(ml) << "\" y2=\"" << detail::format_coord(mt + ph)
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << detail::format_coord(ml + pw / 2) << "\" y=\""
      << detail::format_coord(height - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">SNR (dB)</text>\n";
  svg << "<text x=\"20\" y=\"" << detail::format_coord(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 "
      << detail::format_coord(mt + ph / 2) << ")\">WSR (bps/Hz)</text>\n";

  // Tick labels on both axes.
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / n_ticks;
    const double yv = y_min + (y_max - y_min) * i / n_ticks;
    svg << "<text x=\"" << detail::format_coord(sx(xv)) << "\" y=\""
        << detail::format_coord(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::format_coord(xv) << "</text>\n";
    svg << "<text x=\"" << detail::format_coord(ml - 8) << "\" y=\""
        << detail::format_coord(sy(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::format_coord(yv) << "</text>\n";
  }

  const bool curves = snr_values.size() >= 2;
  std::size_t index = 0;
  for (auto& [name, points] : series) {
    std::sort(points.begin(), points.end());
    const char* color = detail::series_color(index);
    if (curves) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) svg << ' ';
        svg << detail::format_coord(sx(points[i].first)) << ','
            << detail::format_coord(sy(points[i].second));
      }
      svg << "\"/>\n";
    } else {
      // One bar per series, spread across the plot width.
      const double slot = pw / (static_cast<double>(series.size()) + 1.0);
      const double cx = ml + slot * (static_cast<double>(index) + 1.0);
      const double bw = slot * 0.6;
      for (const auto& pt : points) {
        svg << "<rect x=\"" << detail::format_coord(cx - bw / 2) << "\" y=\""
            << detail::format_coord(sy(pt.second)) << "\" width=\"" << detail::format_coord(bw)
            << "\" height=\"" << detail::format_coord(mt + ph - sy(pt.second)) << "\" fill=\""
            << color << "\"/>\n";
      }
    }
    // Legend entry.
    const double ly = mt + 16.0 * (static_cast<double>(index) + 1.0);
    svg << "<rect x=\"" << detail::format_coord(ml + pw + 14) << "\" y=\""
        << detail::format_coord(ly - 9) << "\" width=\"12\" height=\"12\" fill=\"" << color
        << "\"/>\n";
    svg << "<text x=\"" << detail::format_coord(ml + pw + 32) << "\" y=\""
        << detail::format_coord(ly + 1) << "\" font-family=\"sans-serif\" font-size=\"11\">" << name
        << "</text>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void emit_plot(const std::string& csv_path, const std::string& out_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + csv_path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string svg = render_plot_svg(buf.str());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  out << svg;
  if (!out) throw std::runtime_error("write to '" + out_path + "' failed");
}

}  // namespace rsma
