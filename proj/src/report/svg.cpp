// Copyright 2026 The specband Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "specband/error.hpp"
#include "specband/report.hpp"

namespace fs = std::filesystem;

namespace specband {
namespace {

constexpr double kPanelW = 320.0;
constexpr double kPanelH = 240.0;
constexpr double kMargin = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

const char* colour_for(const std::string& name, std::size_t fallback) {
  if (name == "rgb") return "#d62728";
  if (name == "nir") return "#1f77b4";
  if (name == "both") return "#2ca02c";
  static const char* palette[] = {"#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  return palette[fallback % 5];
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"" +
         anchor + "\">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* stroke = "black") {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
}

// Axes with ticks for a panel whose plot area is [x0,x1] x [y0,y1] (SVG
// coordinates, y1 at the bottom).
std::string axes(double x0, double y0, double x1, double y1, double lo, double hi,
                 const std::vector<std::pair<double, std::string>>& xticks) {
  std::string s = line(x0, y1, x1, y1) + line(x0, y0, x0, y1);
  for (const auto& [x, label] : xticks) {
    s += line(x, y1, x, y1 + 4) + text(x, y1 + 16, label);
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    const double y = y1 - (y1 - y0) * i / 4.0;
    s += line(x0 - 4, y, x0, y) + text(x0 - 6, y + 4, num(v), "end");
  }
  return s;
}

std::string severity_lines(const ReportTable& t) {
  if (t.key_columns.size() < 3 || t.key_columns[0] != "model_id" || t.key_columns[1] != "target") {
    throw InvalidArgument("severity_lines needs a robustness_curves table");
  }
  const std::size_t c_mean = t.column("mean");
  const std::size_t c_lo = t.column("ci_low");
  const std::size_t c_hi = t.column("ci_high");

  struct Pt {
    int severity;
    double mean, lo, hi;
  };
  std::map<std::string, std::map<std::string, std::vector<Pt>>> series;
  for (const auto& r : t.rows) {
    series[r.keys[0]][r.keys[1]].push_back(
        {std::stoi(r.keys[2]), r.values[c_mean], r.values[c_lo], r.values[c_hi]});
  }
  const double w = kPanelW * static_cast<double>(series.size());
  const double h = kPanelH + 24.0;
  std::string s = header(w, h);
  std::size_t panel = 0;
  for (auto& [model, targets] : series) {
    const double ox = kPanelW * static_cast<double>(panel++);
    const double x0 = ox + kMargin, x1 = ox + kPanelW - 16.0;
    const double y0 = 28.0, y1 = kPanelH - 28.0;
    auto px = [&](double sev) { return x0 + (x1 - x0) * sev / 5.0; };
    auto py = [&](double v) { return y1 - (y1 - y0) * std::clamp(v, 0.0, 1.0); };
    s += "<g>\n" + text((x0 + x1) / 2.0, 16.0, model);
    std::vector<std::pair<double, std::string>> xt;
    for (int sev = 0; sev <= 5; ++sev) xt.emplace_back(px(sev), std::to_string(sev));
    s += axes(x0, y0, x1, y1, 0.0, 1.0, xt);
    s += text((x0 + x1) / 2.0, kPanelH + 4.0, "severity");
    std::size_t k = 0;
    for (auto& [target, pts] : targets) {
      std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.severity < b.severity; });
      const char* colour = colour_for(target, k);
      std::string band;
      for (const auto& p : pts) band += num(px(p.severity)) + "," + num(py(p.hi)) + " ";
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        band += num(px(it->severity)) + "," + num(py(it->lo)) + " ";
      }
      band.pop_back();
      s += "<polygon points=\"" + band + "\" fill=\"" + colour + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      std::string poly;
      for (const auto& p : pts) poly += num(px(p.severity)) + "," + num(py(p.mean)) + " ";
      poly.pop_back();
      s += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
      const double ly = y0 + 14.0 * static_cast<double>(k);
      s += line(x1 - 70, ly, x1 - 54, ly, colour) + text(x1 - 50, ly + 4, target, "start");
      ++k;
    }
    s += "</g>\n";
  }
  return s + "</svg>\n";
}

std::string ps_bars(const ReportTable& t) {
  if (t.key_columns.size() < 2 || t.key_columns[0] != "model_id" || t.key_columns[1] != "channel") {
    throw InvalidArgument("ps_bars needs a perceptual_scores table");
  }
  const std::size_t c_m = t.column("ps_model");
  const std::size_t c_m_lo = t.column("ps_model_ci_low");
  const std::size_t c_m_hi = t.column("ps_model_ci_high");
  const std::size_t c_t = t.column("ps_task");
  const std::size_t c_t_lo = t.column("ps_task_ci_low");
  const std::size_t c_t_hi = t.column("ps_task_ci_high");

  double lo = 0.0, hi = 1.0;
  for (const auto& r : t.rows) {
    for (std::size_t c : {c_m_lo, c_m_hi, c_t_lo, c_t_hi}) {
      lo = std::min(lo, r.values[c]);
      hi = std::max(hi, r.values[c]);
    }
  }
  const double group_w = 72.0;
  const double w = kMargin + 24.0 + group_w * static_cast<double>(t.rows.size());
  const double h = kPanelH + 40.0;
  const double x0 = kMargin, x1 = w - 16.0, y0 = 28.0, y1 = kPanelH - 8.0;
  auto py = [&](double v) { return y1 - (y1 - y0) * (v - lo) / (hi - lo); };
  std::string s = header(w, h);
  std::vector<std::pair<double, std::string>> xt;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    xt.emplace_back(x0 + 12.0 + group_w * (static_cast<double>(i) + 0.5),
                    t.rows[i].keys[0] + "/" + t.rows[i].keys[1]);
  }
  s += axes(x0, y0, x1, y1, lo, hi, xt);
  s += line(x0, py(0.0), x1, py(0.0), "#999999");
  const char* colours[2] = {"#1f77b4", "#ff7f0e"};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& v = t.rows[i].values;
    const double gx = x0 + 12.0 + group_w * static_cast<double>(i);
    const std::size_t cols[2][3] = {{c_m, c_m_lo, c_m_hi}, {c_t, c_t_lo, c_t_hi}};
    for (int b = 0; b < 2; ++b) {
      const double bx = gx + 8.0 + 28.0 * b;
      const double top = py(std::max(0.0, v[cols[b][0]]));
      const double bottom = py(std::min(0.0, v[cols[b][0]]));
      s += "<rect x=\"" + num(bx) + "\" y=\"" + num(top) + "\" width=\"24.00\" height=\"" +
           num(bottom - top) + "\" fill=\"" + colours[b] + "\"/>\n";
      const double cx = bx + 12.0;
      s += line(cx, py(v[cols[b][1]]), cx, py(v[cols[b][2]])) +
           line(cx - 5, py(v[cols[b][1]]), cx + 5, py(v[cols[b][1]])) +
           line(cx - 5, py(v[cols[b][2]]), cx + 5, py(v[cols[b][2]]));
    }
  }
  s += "<rect x=\"" + num(x1 - 110) + "\" y=\"10.00\" width=\"10.00\" height=\"10.00\" fill=\"" +
       colours[0] + "\"/>\n" + text(x1 - 96, 19.0, "model-normalized", "start");
  s += "<rect x=\"" + num(x1 - 110) + "\" y=\"24.00\" width=\"10.00\" height=\"10.00\" fill=\"" +
       colours[1] + "\"/>\n" + text(x1 - 96, 33.0, "task-normalized", "start");
  return s + "</svg>\n";
}

}  // namespace

PlotStyle parse_plot_style(const std::string& text) {
  if (text == "ps_bars") return PlotStyle::ps_bars;
  if (text == "severity_lines") return PlotStyle::severity_lines;
  throw InvalidArgument("unknown plot style '" + text + "' (ps_bars|severity_lines)");
}

std::string render_svg(const ReportTable& report, PlotStyle style) {
  if (report.rows.empty()) throw InvalidArgument("cannot plot an empty report");
  return style == PlotStyle::severity_lines ? severity_lines(report) : ps_bars(report);
}

void render_plot(const ReportTable& report, PlotStyle style, const fs::path& out_path) {
  const std::string svg = render_svg(report, style);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + out_path.string() + "'");
  out << svg;
}

}  // namespace specband
