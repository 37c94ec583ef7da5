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

#include "specband/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "specband/error.hpp"
#include "specband/rng.hpp"

namespace fs = std::filesystem;

namespace specband {
namespace {

void check_cell(const std::string& cell) {
  if (cell.find_first_of(",\n\r\"") != std::string::npos) {
    throw InvalidArgument("report cell '" + cell + "' contains a delimiter");
  }
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // Avoid "-0.000000" so equal values print identically.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

const char* version() { return SPECBAND_VERSION; }

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

void ReportTable::add_row(std::vector<std::string> keys, std::vector<double> values) {
  if (keys.size() != key_columns.size() || values.size() != value_columns.size()) {
    throw InvalidArgument("report row does not match the column layout");
  }
  for (const auto& k : keys) check_cell(k);
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("report cells must be finite");
  }
  rows.push_back({std::move(keys), std::move(values)});
}

std::size_t ReportTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < value_columns.size(); ++i) {
    if (value_columns[i] == name) return i;
  }
  throw InvalidArgument("report has no column '" + name + "'");
}

std::string ReportTable::to_csv() const {
  std::map<std::string, std::string> meta = metadata;
  meta["specband_version"] = version();
  if (!meta.count("config_hash")) meta["config_hash"] = config_hash(nlohmann::json::object());
  meta["kind"] = kind;
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  std::string header;
  for (const auto& c : key_columns) header += (header.empty() ? "" : ",") + c;
  for (const auto& c : value_columns) header += (header.empty() ? "" : ",") + c;
  out += header + "\n";
  for (const auto& row : rows) {
    std::string line;
    for (const auto& k : row.keys) line += (line.empty() ? "" : ",") + k;
    for (double v : row.values) line += (line.empty() ? "" : ",") + fixed6(v);
    out += line + "\n";
  }
  return out;
}

ReportTable ReportTable::from_csv(const std::string& text) {
  ReportTable t;
  std::stringstream ss(text);
  std::string line;
  bool have_header = false;
  std::size_t n_keys = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      t.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    const auto cells = split_csv_line(line);
    if (!have_header) {
      have_header = true;
      t.kind = t.metadata.count("kind") ? t.metadata["kind"] : "";
      n_keys = t.metadata.count("key_columns") ? std::stoul(t.metadata["key_columns"]) : 0;
      if (n_keys > cells.size()) throw FormatError("report header is shorter than its keys");
      t.key_columns.assign(cells.begin(), cells.begin() + static_cast<long>(n_keys));
      t.value_columns.assign(cells.begin() + static_cast<long>(n_keys), cells.end());
      continue;
    }
    if (cells.size() != n_keys + t.value_columns.size()) {
      throw FormatError("ragged report row: '" + line + "'");
    }
    ReportRow row;
    row.keys.assign(cells.begin(), cells.begin() + static_cast<long>(n_keys));
    for (std::size_t i = n_keys; i < cells.size(); ++i) {
      try {
        row.values.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw FormatError("non-numeric report cell '" + cells[i] + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw FormatError("report has no header line");
  t.metadata.erase("kind");
  return t;
}

ReportTable ReportTable::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str());
}

ReportTable perceptual_score_table(const std::vector<PerceptualScoreSummary>& scores) {
  ReportTable t;
  t.kind = "perceptual_scores";
  t.key_columns = {"model_id", "channel"};
  t.value_columns = {"acc_clean",       "acc_shuffled",     "baseline_acc", "ps_model",
                     "ps_model_ci_low", "ps_model_ci_high", "ps_task",      "ps_task_ci_low",
                     "ps_task_ci_high", "n_seeds",          "n_permutations"};
  t.metadata["key_columns"] = "2";
  for (const auto& s : scores) {
    t.add_row({s.model_id, to_string(s.channel)},
              {s.acc_clean, s.acc_shuffled, s.baseline_acc, s.ps_model,
               s.ps_model - s.ps_model_ci, s.ps_model + s.ps_model_ci, s.ps_task,
               s.ps_task - s.ps_task_ci, s.ps_task + s.ps_task_ci,
               static_cast<double>(s.n_seeds), static_cast<double>(s.n_permutations)});
  }
  return t;
}

ReportTable robustness_table(const std::vector<RobustnessCurve>& curves) {
  ReportTable t;
  t.kind = "robustness_curves";
  t.key_columns = {"model_id", "target", "severity"};
  t.value_columns = {"mean", "ci_low", "ci_high", "n_seeds"};
  t.metadata["key_columns"] = "3";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      t.add_row({c.model_id, to_string(c.target), std::to_string(p.severity)},
                {p.mean, p.ci_low, p.ci_high, static_cast<double>(p.n_seeds)});
    }
  }
  return t;
}

ReportTable confusion_table(const ConfusionMatrix& matrix, const std::vector<std::string>& labels) {
  if (matrix.size() != labels.size()) throw InvalidArgument("confusion matrix and labels differ");
  ReportTable t;
  t.kind = "confusion";
  t.key_columns = {"label"};
  for (const auto& l : labels) t.value_columns.push_back("pred_" + l);
  t.metadata["key_columns"] = "1";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    std::vector<double> v(matrix[i].begin(), matrix[i].end());
    t.add_row({labels[i]}, std::move(v));
  }
  return t;
}

ReportTable iou_table(const IouResult& result, const std::vector<std::string>& labels,
                      const std::set<int>& excluded) {
  if (result.per_class.size() != labels.size()) throw InvalidArgument("IoU result and labels differ");
  ReportTable t;
  t.kind = "iou_summary";
  t.key_columns = {"class"};
  t.value_columns = {"iou", "defined", "excluded"};
  t.metadata["key_columns"] = "1";
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const auto& v = result.per_class[c];
    t.add_row({labels[c]}, {v.value_or(0.0), v ? 1.0 : 0.0,
                            excluded.count(static_cast<int>(c)) ? 1.0 : 0.0});
  }
  if (result.mean) t.add_row({"mean"}, {*result.mean, 1.0, 0.0});
  return t;
}

fs::path write_report_tables(const ReportTable& report, const fs::path& out_dir) {
  if (report.kind.empty()) throw InvalidArgument("report kind is empty");
  fs::create_directories(out_dir);
  const fs::path path = out_dir / (report.kind + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << report.to_csv();
  return path;
}

}  // namespace specband
