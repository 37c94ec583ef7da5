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

#ifndef SPECBAND_REPORT_HPP
#define SPECBAND_REPORT_HPP

// Byte-deterministic CSV tables and SVG plots.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "specband/metrics.hpp"

namespace specband {

/// Toolkit version embedded in every report.
const char* version();

/// 16 hex digits of FNV-1a over the compact JSON dump of `config`.
std::string config_hash(const nlohmann::json& config);

struct ReportRow {
  std::vector<std::string> keys;
  std::vector<double> values;
};

/// Rows of string key cells followed by finite numeric cells, in a fixed
/// column order.
struct ReportTable {
  /// perceptual_scores, robustness_curves, confusion or iou_summary.
  std::string kind;
  std::vector<std::string> key_columns;
  std::vector<std::string> value_columns;
  std::vector<ReportRow> rows;
  /// Written as "# key=value" lines; version and config_hash are always set
  /// on output.
  std::map<std::string, std::string> metadata;

  /// Throws InvalidArgument for ragged rows, non-finite values or cells
  /// that would break the CSV layout.
  void add_row(std::vector<std::string> keys, std::vector<double> values);

  std::size_t column(const std::string& name) const;  // index into values
  std::string to_csv() const;
  static ReportTable from_csv(const std::string& text);
  static ReportTable load(const std::filesystem::path& path);
};

ReportTable perceptual_score_table(const std::vector<PerceptualScoreSummary>& scores);
ReportTable robustness_table(const std::vector<RobustnessCurve>& curves);
ReportTable confusion_table(const ConfusionMatrix& matrix, const std::vector<std::string>& labels);
ReportTable iou_table(const IouResult& result, const std::vector<std::string>& labels,
                      const std::set<int>& excluded);

/// Writes out_dir/<kind>.csv and returns its path.
std::filesystem::path write_report_tables(const ReportTable& report,
                                          const std::filesystem::path& out_dir);

enum class PlotStyle { ps_bars, severity_lines };

PlotStyle parse_plot_style(const std::string& text);

/// Self-contained SVG document. severity_lines needs a robustness_curves
/// table, ps_bars a perceptual_scores table.
std::string render_svg(const ReportTable& report, PlotStyle style);

void render_plot(const ReportTable& report, PlotStyle style, const std::filesystem::path& out_path);

}  // namespace specband

#endif  // SPECBAND_REPORT_HPP
