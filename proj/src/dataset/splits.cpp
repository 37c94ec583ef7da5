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
#include <cmath>
#include <fstream>
#include <numeric>

#include "specband/dataset.hpp"
#include "specband/error.hpp"
#include "specband/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {
namespace {

constexpr double kImprovementEps = 1e-12;

void check_fractions(const std::array<double, 3>& f) {
  double sum = 0.0;
  for (double v : f) {
    if (!(v > 0.0)) throw InvalidArgument("split fractions must all be > 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("split fractions must sum to 1");
}

// Scenes reduced to their weight and one category id per metadata property.
struct Problem {
  std::vector<std::string> property_names;
  std::vector<std::size_t> category_count;         // per property
  std::vector<std::vector<std::size_t>> category;  // [scene][property]
  std::vector<double> weight;
  std::vector<std::vector<double>> global;  // [property][category], normalized
  double total = 0.0;
  std::array<double, 3> target{};  // absolute target weight per split
};

long bin_of(double value, double width) {
  if (!(width > 0.0)) throw InvalidArgument("histogram bin width must be > 0");
  return static_cast<long>(std::floor(value / width));
}

Problem build_problem(const std::vector<SceneRecord>& scenes, const SplitOptions& opt) {
  check_fractions(opt.fractions);
  if (scenes.size() < 3) throw InvalidArgument("at least three scenes are needed for three splits");
  Problem p;
  const bool any_sun = std::any_of(scenes.begin(), scenes.end(), [](const SceneRecord& s) {
    return s.metadata.sun_elevation.has_value();
  });
  p.property_names = {"location", "view_angle", "azimuth"};
  if (any_sun) p.property_names.push_back("sun_elevation");
  const std::size_t np = p.property_names.size();

  std::vector<std::map<std::string, std::size_t>> ids(np);
  p.category.assign(scenes.size(), std::vector<std::size_t>(np));
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto& m = scenes[i].metadata;
    std::vector<std::string> keys = {
        m.location, std::to_string(bin_of(m.view_angle, opt.view_angle_bin)),
        std::to_string(bin_of(std::fmod(std::fmod(m.azimuth, 360.0) + 360.0, 360.0),
                              opt.azimuth_bin))};
    if (any_sun) {
      keys.push_back(m.sun_elevation ? std::to_string(bin_of(*m.sun_elevation, opt.sun_elevation_bin))
                                     : std::string("none"));
    }
    for (std::size_t q = 0; q < np; ++q) {
      auto [it, inserted] = ids[q].emplace(keys[q], ids[q].size());
      p.category[i][q] = it->second;
    }
  }
  p.category_count.resize(np);
  for (std::size_t q = 0; q < np; ++q) p.category_count[q] = ids[q].size();

  p.weight.resize(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    p.weight[i] = opt.weight_by == WeightBy::scene_count
                      ? 1.0
                      : static_cast<double>(scenes[i].weight());
    p.total += p.weight[i];
  }
  if (!(p.total > 0.0)) throw InvalidArgument("total scene weight is zero");

  p.global.resize(np);
  for (std::size_t q = 0; q < np; ++q) {
    p.global[q].assign(p.category_count[q], 0.0);
    for (std::size_t i = 0; i < scenes.size(); ++i) p.global[q][p.category[i][q]] += p.weight[i];
    for (double& v : p.global[q]) v /= p.total;
  }

  if (opt.weight_by == WeightBy::scene_count) {
    const auto sizes = largest_remainder_sizes(scenes.size(), opt.fractions);
    for (std::size_t s = 0; s < 3; ++s) p.target[s] = static_cast<double>(sizes[s]);
  } else {
    for (std::size_t s = 0; s < 3; ++s) p.target[s] = opt.fractions[s] * p.total;
  }
  return p;
}

// Per-split running totals that make single moves cheap to evaluate.
class State {
 public:
  explicit State(const Problem& p) : p_(p), hist_(p.property_names.size()) {
    for (std::size_t q = 0; q < hist_.size(); ++q) {
      for (auto& h : hist_[q]) h.assign(p.category_count[q], 0.0);
    }
  }

  void add(std::size_t scene, std::size_t split, double sign) {
    weight_[split] += sign * p_.weight[scene];
    count_[split] += sign > 0 ? 1 : -1;
    assigned_ += sign * p_.weight[scene];
    for (std::size_t q = 0; q < hist_.size(); ++q) {
      hist_[q][split][p_.category[scene][q]] += sign * p_.weight[scene];
    }
  }

  long count(std::size_t split) const { return count_[split]; }
  double weight(std::size_t split) const { return weight_[split]; }

  double divergence(std::size_t q) const {
    double sum = 0.0;
    int used = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      if (count_[s] == 0 || !(weight_[s] > 0.0)) continue;
      double tv = 0.0;
      for (std::size_t c = 0; c < p_.category_count[q]; ++c) {
        tv += std::abs(hist_[q][s][c] / weight_[s] - p_.global[q][c]);
      }
      sum += 0.5 * tv;
      ++used;
    }
    return used == 0 ? 0.0 : sum / used;
  }

  /// With `partial`, targets are the split fractions of the weight assigned
  /// so far; otherwise the final targets.
  double objective(const SplitOptions& opt, bool partial) const {
    if (!(assigned_ > 0.0)) return 0.0;
    double dev = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      const double t = partial ? opt.fractions[s] * assigned_ : p_.target[s];
      dev += std::abs(weight_[s] - t);
    }
    dev /= partial ? assigned_ : p_.total;
    double div = 0.0;
    for (std::size_t q = 0; q < hist_.size(); ++q) div += divergence(q);
    return dev + opt.lambda * div;
  }

 private:
  const Problem& p_;
  std::array<double, 3> weight_{};
  std::array<long, 3> count_{};
  double assigned_ = 0.0;
  std::vector<std::array<std::vector<double>, 3>> hist_;
};

std::size_t idx(Split s) { return static_cast<std::size_t>(s); }

}  // namespace

WeightBy parse_weight_by(const std::string& text) {
  if (text == "scene_count") return WeightBy::scene_count;
  if (text == "item_count") return WeightBy::item_count;
  throw InvalidArgument("unknown weighting '" + text + "' (scene_count|item_count)");
}

std::array<std::size_t, 3> largest_remainder_sizes(std::size_t count,
                                                   const std::array<double, 3>& fractions) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = fractions[s] * static_cast<double>(count);
    sizes[s] = static_cast<std::size_t>(std::floor(exact));
    rem[s] = exact - static_cast<double>(sizes[s]);
    used += sizes[s];
  }
  // Remainders within rounding noise of each other count as ties.
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-9; });
  for (std::size_t k = 0; used < count; ++k, ++used) ++sizes[order[k % 3]];
  return sizes;
}

double split_objective(const std::vector<SceneRecord>& scenes, const std::vector<Split>& splits,
                       const SplitOptions& options) {
  if (splits.size() != scenes.size()) throw InvalidArgument("one split per scene is required");
  const Problem p = build_problem(scenes, options);
  State st(p);
  for (std::size_t i = 0; i < scenes.size(); ++i) st.add(i, idx(splits[i]), 1.0);
  return st.objective(options, false);
}

SplitAssignment assign_splits(const std::vector<SceneRecord>& input, const SplitOptions& options) {
  // Canonical order first so the result does not depend on input order.
  std::vector<SceneRecord> scenes = input;
  std::sort(scenes.begin(), scenes.end(),
            [](const SceneRecord& a, const SceneRecord& b) { return a.scene_id < b.scene_id; });
  for (std::size_t i = 1; i < scenes.size(); ++i) {
    if (scenes[i].scene_id == scenes[i - 1].scene_id) {
      throw InvalidArgument("duplicate scene id '" + scenes[i].scene_id + "'");
    }
  }
  const Problem p = build_problem(scenes, options);
  const std::size_t n = scenes.size();

  // Seeded shuffle breaks ties among equal weights, then heaviest first.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Xoshiro256pp rng(options.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p.weight[a] > p.weight[b]; });

  State st(p);
  std::vector<std::size_t> where(n);
  for (std::size_t i : order) {
    double best = 0.0;
    std::size_t best_s = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      st.add(i, s, 1.0);
      const double v = st.objective(options, true);
      st.add(i, s, -1.0);
      if (s == 0 || v < best - kImprovementEps) {
        best = v;
        best_s = s;
      }
    }
    st.add(i, best_s, 1.0);
    where[i] = best_s;
  }

  auto try_move = [&](std::size_t i, std::size_t to, double current) -> std::optional<double> {
    const std::size_t from = where[i];
    st.add(i, from, -1.0);
    st.add(i, to, 1.0);
    const double v = st.objective(options, false);
    st.add(i, to, -1.0);
    st.add(i, from, 1.0);
    if (v < current - kImprovementEps) return v;
    return std::nullopt;
  };
  auto do_move = [&](std::size_t i, std::size_t to) {
    st.add(i, where[i], -1.0);
    st.add(i, to, 1.0);
    where[i] = to;
  };

  // Fill empty splits with the cheapest donor scene.
  for (std::size_t s = 0; s < 3; ++s) {
    if (st.count(s) > 0) continue;
    double best = 0.0;
    std::optional<std::size_t> pick;
    for (std::size_t i : order) {
      if (st.count(where[i]) < 2) continue;
      const std::size_t from = where[i];
      st.add(i, from, -1.0);
      st.add(i, s, 1.0);
      const double v = st.objective(options, false);
      st.add(i, s, -1.0);
      st.add(i, from, 1.0);
      if (!pick || v < best - kImprovementEps) {
        best = v;
        pick = i;
      }
    }
    if (!pick) throw InvalidArgument("cannot make every split non-empty");
    do_move(*pick, s);
  }

  double current = st.objective(options, false);
  for (int pass = 0; pass < options.max_passes; ++pass) {
    bool improved = false;
    for (std::size_t i : order) {
      for (std::size_t to = 0; to < 3; ++to) {
        if (to == where[i] || st.count(where[i]) < 2) continue;
        if (auto v = try_move(i, to, current)) {
          do_move(i, to);
          current = *v;
          improved = true;
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const std::size_t sa = where[order[a]];
        const std::size_t sb = where[order[b]];
        if (sa == sb) continue;
        do_move(order[a], sb);
        do_move(order[b], sa);
        const double v = st.objective(options, false);
        if (v < current - kImprovementEps) {
          current = v;
          improved = true;
        } else {
          do_move(order[a], sa);
          do_move(order[b], sb);
        }
      }
    }
    if (!improved) break;
  }

  SplitAssignment out;
  out.target_fractions = options.fractions;
  for (std::size_t i = 0; i < n; ++i) {
    out.assignment[scenes[i].scene_id] = static_cast<Split>(where[i]);
  }
  for (std::size_t s = 0; s < 3; ++s) out.achieved_fractions[s] = st.weight(s) / p.total;
  for (std::size_t q = 0; q < p.property_names.size(); ++q) {
    out.divergence[p.property_names[q]] = st.divergence(q);
  }
  out.objective = current;
  return out;
}

Split SplitAssignment::of(const std::string& scene_id) const {
  auto it = assignment.find(scene_id);
  if (it == assignment.end()) throw InvalidArgument("scene '" + scene_id + "' has no split");
  return it->second;
}

json SplitAssignment::to_json() const {
  json a = json::object();
  for (const auto& [id, split] : assignment) a[id] = to_string(split);
  return {{"assignment", a},
          {"target_fractions", target_fractions},
          {"achieved_fractions", achieved_fractions},
          {"divergence", divergence},
          {"objective", objective}};
}

SplitAssignment SplitAssignment::from_json(const json& doc) {
  SplitAssignment out;
  try {
    for (const auto& [id, split] : doc.at("assignment").items()) {
      out.assignment[id] = parse_split(split.get<std::string>());
    }
    if (doc.contains("target_fractions")) {
      out.target_fractions = doc["target_fractions"].get<std::array<double, 3>>();
    }
    if (doc.contains("achieved_fractions")) {
      out.achieved_fractions = doc["achieved_fractions"].get<std::array<double, 3>>();
    }
    if (doc.contains("divergence")) {
      out.divergence = doc["divergence"].get<std::map<std::string, double>>();
    }
    out.objective = doc.value("objective", 0.0);
  } catch (const json::exception& e) {
    throw FormatError(std::string("split assignment: ") + e.what());
  }
  return out;
}

SplitAssignment SplitAssignment::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split file '" + path.string() + "'");
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void SplitAssignment::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
}

}  // namespace specband
