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
#include <fstream>
#include <numeric>
#include <sstream>

#include "specband/error.hpp"
#include "specband/metrics.hpp"
#include "specband/parallel.hpp"
#include "specband/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {
namespace {

std::vector<std::string> split_dash(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '-')) parts.push_back(part);
  return parts;
}

std::size_t parse_index(const std::string& text, const std::string& context) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), ::isdigit)) {
    throw InvalidArgument("bad number in " + context);
  }
  return std::stoull(text);
}

MultiChannelImage load_mask(const fs::path& path) {
  auto img = load_raster(path);
  if (img.channel_count() != 1) {
    throw FormatError("mask '" + path.string() + "' must have a single channel");
  }
  return img;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

PredictionVariant PredictionVariant::clean() { return {}; }

PredictionVariant PredictionVariant::corrupted(CorruptionKind kind, int severity,
                                               CorruptionTarget target) {
  PredictionVariant v;
  v.type = Type::corrupted;
  v.kind = kind;
  v.severity = severity;
  v.target = target;
  return v;
}

PredictionVariant PredictionVariant::counterfactual(ShuffleChannel channel,
                                                    std::size_t permutation) {
  PredictionVariant v;
  v.type = Type::counterfactual;
  v.channel = channel;
  v.permutation = permutation;
  return v;
}

std::string PredictionVariant::to_string() const {
  switch (type) {
    case Type::clean:
      return "clean";
    case Type::corrupted:
      return "corrupted-" + specband::to_string(kind) + "-s" + std::to_string(severity) + "-" +
             specband::to_string(target);
    case Type::counterfactual:
      return "cf-" + specband::to_string(channel) + "-p" + std::to_string(permutation);
  }
  return "clean";
}

PredictionVariant PredictionVariant::parse(const std::string& text) {
  if (text == "clean") return clean();
  const auto parts = split_dash(text);
  const std::string ctx = "variant '" + text + "'";
  if (parts.size() == 4 && parts[0] == "corrupted" && parts[2].size() > 1 && parts[2][0] == 's') {
    const int severity = static_cast<int>(parse_index(parts[2].substr(1), ctx));
    if (severity < 1 || severity > kMaxSeverity) throw InvalidArgument("bad severity in " + ctx);
    return corrupted(parse_corruption_kind(parts[1]), severity, parse_corruption_target(parts[3]));
  }
  if (parts.size() == 3 && parts[0] == "cf" && parts[2].size() > 1 && parts[2][0] == 'p') {
    return counterfactual(parse_shuffle_channel(parts[1]), parse_index(parts[2].substr(1), ctx));
  }
  throw InvalidArgument("unrecognised " + ctx);
}

fs::path PredictionManifest::relative_path() const {
  return fs::path(model_id) / variant.to_string() / (seed_id + ".jsonl");
}

fs::path PredictionManifest::resolve(const fs::path& p) const {
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

fs::path PredictionManifest::save(const fs::path& root) const {
  if (model_id.empty() || seed_id.empty()) throw InvalidArgument("model_id and seed_id are required");
  const fs::path path = root / relative_path();
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& [id, rec] : records) {
    json j = {{"item_id", id}};
    if (rec.pred) {
      j["pred"] = *rec.pred;
    } else {
      j["mask_path"] = rec.mask_path.generic_string();
    }
    out << j.dump() << '\n';
  }
  return path;
}

PredictionManifest PredictionManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions '" + path.string() + "'");
  PredictionManifest m;
  m.seed_id = path.stem().string();
  m.variant = PredictionVariant::parse(path.parent_path().filename().string());
  m.model_id = path.parent_path().parent_path().filename().string();
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto id = j.at("item_id").get<std::string>();
      PredictionRecord rec;
      if (j.contains("pred")) {
        rec.pred = j["pred"].get<int>();
      } else {
        rec.mask_path = j.at("mask_path").get<std::string>();
      }
      if (!m.records.emplace(id, std::move(rec)).second) {
        throw FormatError("'" + path.string() + "': duplicate item '" + id + "'");
      }
    } catch (const json::exception& e) {
      throw FormatError("'" + path.string() + "' line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return m;
}

std::vector<PredictionManifest> load_prediction_dir(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("'" + root.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".jsonl") continue;
    const auto rel = entry.path().lexically_relative(root);
    if (std::distance(rel.begin(), rel.end()) == 3) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PredictionManifest> out;
  for (const auto& f : files) out.push_back(PredictionManifest::load(f));
  std::sort(out.begin(), out.end(), [](const PredictionManifest& a, const PredictionManifest& b) {
    return std::make_tuple(a.model_id, a.variant.to_string(), a.seed_id) <
           std::make_tuple(b.model_id, b.variant.to_string(), b.seed_id);
  });
  return out;
}

double evaluate_manifest(const DatasetManifest& dataset, const PredictionManifest& predictions,
                         const AccuracyFunction& acc_fn, const std::optional<Split>& split) {
  std::set<std::string> known;
  for (const auto& item : dataset.items) known.insert(item.item_id);
  for (const auto& [id, rec] : predictions.records) {
    if (!known.count(id)) throw InvalidArgument("prediction for unknown item '" + id + "'");
  }
  const auto selected = dataset.select(split);
  if (selected.empty()) throw InvalidArgument("no items in the evaluated split");
  std::vector<std::string> missing;
  for (std::size_t i : selected) {
    if (!predictions.records.count(dataset.items[i].item_id)) {
      missing.push_back(dataset.items[i].item_id);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing predictions for " + std::to_string(missing.size()) + " item(s):";
    for (const auto& id : missing) msg += " " + id;
    throw InvalidArgument(msg);
  }

  if (acc_fn.task == Task::classification) {
    LabelMap preds, labels;
    for (std::size_t i : selected) {
      const auto& item = dataset.items[i];
      const auto& rec = predictions.records.at(item.item_id);
      if (!rec.pred) throw InvalidArgument("item '" + item.item_id + "' has no class prediction");
      preds[item.item_id] = *rec.pred;
      labels[item.item_id] = item.label.value();
    }
    return zero_one_accuracy(preds, labels);
  }

  std::vector<IouAccumulator> per_item(selected.size(),
                                       IouAccumulator(acc_fn.num_classes, acc_fn.excluded_class_ids));
  parallel_for(selected.size(), default_thread_count(), [&](std::size_t k) {
    const auto& item = dataset.items[selected[k]];
    const auto& rec = predictions.records.at(item.item_id);
    if (rec.mask_path.empty()) {
      throw InvalidArgument("item '" + item.item_id + "' has no mask prediction");
    }
    const auto label = load_mask(dataset.resolve(item.mask_path));
    const auto pred = load_mask(predictions.resolve(rec.mask_path));
    if (label.width() != pred.width() || label.height() != pred.height()) {
      throw InvalidArgument("item '" + item.item_id + "': mask shapes differ");
    }
    per_item[k].add(pred.plane(0), label.plane(0));
  });

  if (acc_fn.aggregation == IouAggregation::pooled) {
    IouAccumulator total(acc_fn.num_classes, acc_fn.excluded_class_ids);
    for (const auto& a : per_item) total.add(a);
    const auto r = total.result();
    if (!r.mean) throw InvalidArgument("no scored class occurs in the evaluated masks");
    return *r.mean;
  }
  std::vector<double> means;
  for (const auto& a : per_item) {
    if (auto m = a.result().mean) means.push_back(*m);
  }
  if (means.empty()) throw InvalidArgument("no scored class occurs in the evaluated masks");
  return mean_of(means);
}

double baseline_accuracy(const DatasetManifest& dataset, const AccuracyFunction& acc_fn,
                         const std::optional<Split>& split) {
  const auto selected = dataset.select(split);
  if (selected.empty()) throw InvalidArgument("no items in the evaluated split");
  if (acc_fn.task == Task::classification) {
    std::vector<int> labels;
    for (std::size_t i : selected) labels.push_back(dataset.items[i].label.value());
    return majority_vote_accuracy(labels);
  }
  std::vector<MultiChannelImage> masks;
  std::vector<std::uint64_t> counts(acc_fn.num_classes, 0);
  for (std::size_t i : selected) {
    masks.push_back(load_mask(dataset.resolve(dataset.items[i].mask_path)));
    for (Sample v : masks.back().plane(0)) {
      if (v >= counts.size()) throw InvalidArgument("mask value outside the label set");
      ++counts[v];
    }
  }
  const auto majority = static_cast<Sample>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  IouAccumulator total(acc_fn.num_classes, acc_fn.excluded_class_ids);
  std::vector<double> means;
  for (const auto& m : masks) {
    const Plane constant(m.pixel_count(), majority);
    IouAccumulator one(acc_fn.num_classes, acc_fn.excluded_class_ids);
    one.add(constant, m.plane(0));
    if (auto v = one.result().mean) means.push_back(*v);
    total.add(one);
  }
  if (acc_fn.aggregation == IouAggregation::pooled) {
    const auto r = total.result();
    if (!r.mean) throw InvalidArgument("no scored class occurs in the evaluated masks");
    return *r.mean;
  }
  if (means.empty()) throw InvalidArgument("no scored class occurs in the evaluated masks");
  return mean_of(means);
}

std::vector<PerceptualScoreSummary> score_predictions(
    const DatasetManifest& dataset, const CounterfactualPlan& plan,
    const std::vector<PredictionManifest>& manifests, const AccuracyFunction& acc_fn) {
  plan.validate();
  if (plan.permutations.empty()) throw InvalidArgument("the plan has no permutations");
  const auto selected = dataset.select(plan.split);
  if (selected.size() != plan.n_items) {
    throw InvalidArgument("plan size does not match the evaluated split");
  }
  if (!plan.item_ids.empty()) {
    for (std::size_t k = 0; k < selected.size(); ++k) {
      if (dataset.items[selected[k]].item_id != plan.item_ids[k]) {
        throw InvalidArgument("plan items do not match the dataset");
      }
    }
  }
  const double baseline = baseline_accuracy(dataset, acc_fn, plan.split);

  // model -> seed -> variant -> manifest
  std::map<std::string, std::map<std::string, std::map<std::string, const PredictionManifest*>>>
      index;
  for (const auto& m : manifests) index[m.model_id][m.seed_id][m.variant.to_string()] = &m;

  std::vector<PerceptualScoreSummary> out;
  for (const auto& [model, seeds] : index) {
    PerceptualScoreSummary s;
    s.model_id = model;
    s.channel = plan.channel;
    s.n_permutations = plan.permutations.size();
    for (const auto& [seed, variants] : seeds) {
      bool any_cf = false;
      for (const auto& [name, m] : variants) {
        if (m->variant.type == PredictionVariant::Type::counterfactual &&
            m->variant.channel == plan.channel) {
          any_cf = true;
        }
      }
      if (!any_cf) continue;
      auto clean = variants.find("clean");
      if (clean == variants.end()) {
        throw InvalidArgument("model '" + model + "' seed '" + seed + "' has no clean predictions");
      }
      const double acc_clean = evaluate_manifest(dataset, *clean->second, acc_fn, plan.split);
      std::vector<double> shuffled;
      for (std::size_t k = 0; k < plan.permutations.size(); ++k) {
        const auto name = PredictionVariant::counterfactual(plan.channel, k).to_string();
        auto it = variants.find(name);
        if (it == variants.end()) {
          throw InvalidArgument("model '" + model + "' seed '" + seed + "' lacks '" + name + "'");
        }
        shuffled.push_back(evaluate_manifest(dataset, *it->second, acc_fn, plan.split));
      }
      s.per_seed.push_back(perceptual_score(acc_clean, shuffled, baseline, plan.channel));
    }
    if (s.per_seed.empty()) continue;
    std::vector<double> clean_v, shuf_v, model_v, task_v;
    for (const auto& r : s.per_seed) {
      clean_v.push_back(r.acc_clean);
      shuf_v.push_back(mean_of(r.shuffled_accs));
      model_v.push_back(r.ps_model);
      task_v.push_back(r.ps_task);
    }
    s.n_seeds = s.per_seed.size();
    s.acc_clean = mean_of(clean_v);
    s.acc_shuffled = mean_of(shuf_v);
    s.baseline_acc = baseline;
    s.ps_model = mean_of(model_v);
    s.ps_model_ci = ci_half_width(model_v);
    s.ps_task = mean_of(task_v);
    s.ps_task_ci = ci_half_width(task_v);
    out.push_back(std::move(s));
  }
  if (out.empty()) {
    throw InvalidArgument("no counterfactual predictions for channel '" +
                          to_string(plan.channel) + "'");
  }
  return out;
}

}  // namespace specband
