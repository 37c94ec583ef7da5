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

#include <cmath>
#include <numeric>
#include <tuple>

#include "specband/error.hpp"
#include "specband/metrics.hpp"

namespace specband {

double ci_half_width(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return 1.96 * sd / std::sqrt(static_cast<double>(n));
}

std::vector<RobustnessCurve> robustness_curves(const std::vector<RobustnessRecord>& records) {
  if (records.empty()) return {};

  // model -> target -> severity -> seed -> kind -> accuracy. Clean records
  // are keyed under kind index -1 and attached to every target of the model.
  using KindMap = std::map<int, double>;
  using SeedMap = std::map<std::string, KindMap>;
  std::map<std::string, std::map<int, std::map<int, SeedMap>>> grid;
  std::map<std::string, SeedMap> clean;

  for (const auto& r : records) {
    if (r.severity < 0 || r.severity > kMaxSeverity) {
      throw InvalidArgument("severity " + std::to_string(r.severity) + " outside 0..5");
    }
    if (!(r.accuracy >= 0.0 && r.accuracy <= 1.0)) {
      throw InvalidArgument("accuracy outside [0, 1] for model '" + r.model_id + "'");
    }
    if ((r.severity == 0) != !r.kind.has_value()) {
      throw InvalidArgument("clean records must have severity 0 and no kind");
    }
    if (r.severity == 0) {
      if (!clean[r.model_id][r.seed_id].emplace(-1, r.accuracy).second) {
        throw InvalidArgument("duplicate clean record for model '" + r.model_id + "' seed '" +
                              r.seed_id + "'");
      }
      continue;
    }
    auto& kinds = grid[r.model_id][static_cast<int>(r.target)][r.severity][r.seed_id];
    if (!kinds.emplace(static_cast<int>(*r.kind), r.accuracy).second) {
      throw InvalidArgument("duplicate record for model '" + r.model_id + "' " +
                            to_string(*r.kind) + " s" + std::to_string(r.severity) + " " +
                            to_string(r.target) + " seed '" + r.seed_id + "'");
    }
  }

  auto point = [](int severity, const SeedMap& seeds) {
    // Every seed must cover the same kinds, or the per-seed means would not
    // be comparable.
    const KindMap& first = seeds.begin()->second;
    std::vector<double> per_seed;
    for (const auto& [seed, kinds] : seeds) {
      if (kinds.size() != first.size() ||
          !std::equal(kinds.begin(), kinds.end(), first.begin(),
                      [](const auto& a, const auto& b) { return a.first == b.first; })) {
        throw InvalidArgument("inconsistent kind coverage across seeds at severity " +
                              std::to_string(severity));
      }
      double sum = 0.0;
      for (const auto& [kind, acc] : kinds) sum += acc;
      per_seed.push_back(sum / static_cast<double>(kinds.size()));
    }
    CurvePoint p;
    p.severity = severity;
    p.n_seeds = per_seed.size();
    p.mean = std::accumulate(per_seed.begin(), per_seed.end(), 0.0) /
             static_cast<double>(per_seed.size());
    const double half = ci_half_width(per_seed);
    p.ci_low = p.mean - half;
    p.ci_high = p.mean + half;
    return p;
  };

  std::set<std::string> models;
  for (const auto& [m, t] : grid) models.insert(m);
  for (const auto& [m, s] : clean) models.insert(m);

  std::vector<RobustnessCurve> out;
  for (const auto& model : models) {
    std::set<int> targets;
    if (auto it = grid.find(model); it != grid.end()) {
      for (const auto& [t, sev] : it->second) targets.insert(t);
    }
    // A model with only clean records still yields its anchor point.
    if (targets.empty()) targets.insert(static_cast<int>(CorruptionTarget::both));
    for (int t : targets) {
      RobustnessCurve curve;
      curve.model_id = model;
      curve.target = static_cast<CorruptionTarget>(t);
      if (auto it = clean.find(model); it != clean.end()) {
        curve.points.push_back(point(0, it->second));
      }
      if (auto it = grid.find(model); it != grid.end()) {
        if (auto jt = it->second.find(t); jt != it->second.end()) {
          for (const auto& [sev, seeds] : jt->second) curve.points.push_back(point(sev, seeds));
        }
      }
      out.push_back(std::move(curve));
    }
  }
  return out;
}

std::vector<RobustnessRecord> robustness_records(const DatasetManifest& dataset,
                                                 const std::vector<PredictionManifest>& manifests,
                                                 const AccuracyFunction& acc_fn,
                                                 const std::optional<Split>& split) {
  std::vector<RobustnessRecord> out;
  for (const auto& m : manifests) {
    if (m.variant.type == PredictionVariant::Type::counterfactual) continue;
    RobustnessRecord r;
    r.model_id = m.model_id;
    r.seed_id = m.seed_id;
    if (m.variant.type == PredictionVariant::Type::corrupted) {
      r.kind = m.variant.kind;
      r.severity = m.variant.severity;
      r.target = m.variant.target;
    }
    r.accuracy = evaluate_manifest(dataset, m, acc_fn, split);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace specband
