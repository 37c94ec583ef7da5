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

#include "specband/error.hpp"
#include "specband/metrics.hpp"
#include "specband/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {
namespace {

void check_same_keys(const LabelMap& preds, const LabelMap& labels) {
  if (labels.empty()) throw InvalidArgument("accuracy over an empty item set");
  if (preds.size() != labels.size()) throw InvalidArgument("prediction and label keys differ");
  for (auto p = preds.begin(), l = labels.begin(); p != preds.end(); ++p, ++l) {
    if (p->first != l->first) {
      throw InvalidArgument("prediction and label keys differ at '" + p->first + "'");
    }
  }
}

void check_class(int c, int num_classes) {
  if (c < 0 || c >= num_classes) {
    throw InvalidArgument("class id " + std::to_string(c) + " outside [0, " +
                          std::to_string(num_classes) + ")");
  }
}

}  // namespace

double zero_one_accuracy(const LabelMap& preds, const LabelMap& labels) {
  check_same_keys(preds, labels);
  std::size_t hits = 0;
  for (auto p = preds.begin(), l = labels.begin(); p != preds.end(); ++p, ++l) {
    if (p->second == l->second) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

ConfusionMatrix confusion_matrix(const LabelMap& preds, const LabelMap& labels, int num_classes) {
  if (num_classes < 1) throw InvalidArgument("num_classes must be >= 1");
  check_same_keys(preds, labels);
  ConfusionMatrix m(num_classes, std::vector<std::uint64_t>(num_classes, 0));
  for (auto p = preds.begin(), l = labels.begin(); p != preds.end(); ++p, ++l) {
    check_class(p->second, num_classes);
    check_class(l->second, num_classes);
    ++m[l->second][p->second];
  }
  return m;
}

double majority_vote_accuracy(std::span<const int> labels) {
  if (labels.empty()) throw InvalidArgument("majority vote over an empty label set");
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t best = 0;
  for (const auto& [label, n] : counts) best = std::max(best, n);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

double majority_vote_accuracy(const LabelMap& labels) {
  std::vector<int> v;
  v.reserve(labels.size());
  for (const auto& [id, l] : labels) v.push_back(l);
  return majority_vote_accuracy(v);
}

IouAccumulator::IouAccumulator(int num_classes, std::set<int> excluded)
    : num_classes_(num_classes),
      excluded_(std::move(excluded)),
      inter_(num_classes > 0 ? num_classes : 0, 0),
      union_(num_classes > 0 ? num_classes : 0, 0) {
  if (num_classes < 1) throw InvalidArgument("num_classes must be >= 1");
}

void IouAccumulator::add(std::span<const Sample> pred, std::span<const Sample> label) {
  if (pred.size() != label.size()) throw InvalidArgument("mask shapes differ");
  const auto nc = static_cast<Sample>(num_classes_);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Sample p = pred[i];
    const Sample l = label[i];
    if (p >= nc || l >= nc) {
      throw InvalidArgument("mask value " + std::to_string(std::max(p, l)) +
                            " outside [0, " + std::to_string(num_classes_) + ")");
    }
    if (p == l) {
      ++inter_[p];
      ++union_[p];
    } else {
      ++union_[p];
      ++union_[l];
    }
  }
}

void IouAccumulator::add(const IouAccumulator& other) {
  if (other.num_classes_ != num_classes_) throw InvalidArgument("class counts differ");
  for (int c = 0; c < num_classes_; ++c) {
    inter_[c] += other.inter_[c];
    union_[c] += other.union_[c];
  }
}

IouResult IouAccumulator::result() const {
  IouResult r;
  r.per_class.resize(num_classes_);
  double sum = 0.0;
  std::size_t used = 0;
  for (int c = 0; c < num_classes_; ++c) {
    if (union_[c] == 0) continue;
    const double v = static_cast<double>(inter_[c]) / static_cast<double>(union_[c]);
    r.per_class[c] = v;
    if (excluded_.count(c)) continue;
    sum += v;
    ++used;
  }
  if (used > 0) r.mean = sum / static_cast<double>(used);
  return r;
}

IouResult iou(std::span<const Sample> pred, std::span<const Sample> label, int num_classes,
              const std::set<int>& excluded) {
  IouAccumulator acc(num_classes, excluded);
  acc.add(pred, label);
  return acc.result();
}

IouResult iou(const MultiChannelImage& pred, const MultiChannelImage& label, int num_classes,
              const std::set<int>& excluded) {
  if (pred.width() != label.width() || pred.height() != label.height()) {
    throw InvalidArgument("mask shapes differ");
  }
  if (pred.channel_count() != 1 || label.channel_count() != 1) {
    throw InvalidArgument("masks must have a single channel");
  }
  return iou(pred.plane(0), label.plane(0), num_classes, excluded);
}

AccuracyFunction AccuracyFunction::for_manifest(const DatasetManifest& manifest) {
  AccuracyFunction f;
  f.task = manifest.task;
  f.num_classes = static_cast<int>(manifest.label_set.size());
  f.excluded_class_ids.insert(manifest.excluded_class_ids.begin(),
                              manifest.excluded_class_ids.end());
  return f;
}

std::string to_string(ShuffleChannel channel) {
  return channel == ShuffleChannel::rgb ? "rgb" : "nir";
}

ShuffleChannel parse_shuffle_channel(const std::string& text) {
  if (text == "rgb") return ShuffleChannel::rgb;
  if (text == "nir") return ShuffleChannel::nir;
  throw InvalidArgument("unknown channel '" + text + "' (rgb|nir)");
}

void CounterfactualPlan::validate() const {
  if (!item_ids.empty() && item_ids.size() != n_items) {
    throw InvalidArgument("plan item list does not match n_items");
  }
  std::vector<char> seen(n_items);
  for (std::size_t k = 0; k < permutations.size(); ++k) {
    const auto& perm = permutations[k];
    if (perm.size() != n_items) {
      throw InvalidArgument("permutation " + std::to_string(k) + " has the wrong length");
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t v : perm) {
      if (v >= n_items || seen[v]) {
        throw InvalidArgument("permutation " + std::to_string(k) + " is not a bijection");
      }
      seen[v] = 1;
    }
  }
}

json CounterfactualPlan::to_json() const {
  json j = {{"channel", to_string(channel)},
            {"seed", seed},
            {"n_items", n_items},
            {"permutations", permutations}};
  if (!item_ids.empty()) j["item_ids"] = item_ids;
  if (split) j["split"] = to_string(*split);
  return j;
}

CounterfactualPlan CounterfactualPlan::from_json(const json& doc) {
  CounterfactualPlan p;
  try {
    p.channel = parse_shuffle_channel(doc.at("channel").get<std::string>());
    p.seed = doc.value("seed", std::uint64_t{0});
    p.n_items = doc.at("n_items").get<std::size_t>();
    p.permutations = doc.at("permutations").get<std::vector<std::vector<std::size_t>>>();
    if (doc.contains("item_ids")) p.item_ids = doc["item_ids"].get<std::vector<std::string>>();
    if (doc.contains("split")) p.split = parse_split(doc["split"].get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("counterfactual plan: ") + e.what());
  }
  p.validate();
  return p;
}

CounterfactualPlan CounterfactualPlan::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan '" + path.string() + "'");
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void CounterfactualPlan::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
}

CounterfactualPlan make_counterfactual_plan(std::size_t n_items, ShuffleChannel channel,
                                            std::size_t k, std::uint64_t seed) {
  if (n_items < 1) throw InvalidArgument("a plan needs at least one item");
  CounterfactualPlan plan;
  plan.channel = channel;
  plan.seed = seed;
  plan.n_items = n_items;
  Xoshiro256pp rng(seed);
  plan.permutations.reserve(k);
  for (std::size_t p = 0; p < k; ++p) {
    std::vector<std::size_t> perm(n_items);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n_items - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    plan.permutations.push_back(std::move(perm));
  }
  return plan;
}

CounterfactualPlan make_counterfactual_plan(const DatasetManifest& manifest,
                                            const std::optional<Split>& split,
                                            ShuffleChannel channel, std::size_t k,
                                            std::uint64_t seed) {
  const auto selected = manifest.select(split);
  if (selected.empty()) throw InvalidArgument("no items in the evaluated split");
  auto plan = make_counterfactual_plan(selected.size(), channel, k, seed);
  plan.split = split;
  for (std::size_t i : selected) plan.item_ids.push_back(manifest.items[i].item_id);
  return plan;
}

PerceptualScoreResult perceptual_score(double acc_clean, std::span<const double> shuffled_accs,
                                       double baseline_acc, ShuffleChannel channel) {
  if (!(acc_clean > 0.0) || acc_clean > 1.0) {
    throw InvalidArgument("clean accuracy must lie in (0, 1] for a model-normalized score");
  }
  if (!(baseline_acc > 0.0) || baseline_acc > 1.0) {
    throw InvalidArgument("baseline accuracy must lie in (0, 1]");
  }
  if (shuffled_accs.empty()) throw InvalidArgument("no shuffled accuracies");
  PerceptualScoreResult r;
  r.channel = channel;
  r.acc_clean = acc_clean;
  r.baseline_acc = baseline_acc;
  r.shuffled_accs.assign(shuffled_accs.begin(), shuffled_accs.end());
  // Sorted summation of offsets from the minimum: independent of order, and
  // exact when every shuffled accuracy is the same.
  std::vector<double> sorted = r.shuffled_accs;
  std::sort(sorted.begin(), sorted.end());
  double offset = 0.0;
  for (double a : sorted) offset += a - sorted.front();
  const double mean = sorted.front() + offset / static_cast<double>(sorted.size());
  r.ps_model = (acc_clean - mean) / acc_clean;
  r.ps_task = (acc_clean - mean) / baseline_acc;
  for (double a : r.shuffled_accs) {
    r.per_permutation_model.push_back((acc_clean - a) / acc_clean);
    r.per_permutation_task.push_back((acc_clean - a) / baseline_acc);
  }
  return r;
}

}  // namespace specband
