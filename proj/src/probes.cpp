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

#include "specband/probes.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "specband/error.hpp"
#include "specband/parallel.hpp"
#include "specband/png_io.hpp"

namespace fs = std::filesystem;

namespace specband {
namespace {

void check_inputs(const MultiChannelImage& rgb, const MultiChannelImage& nir) {
  if (rgb.bit_depth() != 8 || nir.bit_depth() != 8) {
    throw InvalidArgument("probe inputs must be 8-bit");
  }
  if (rgb.channel_count() == 0 || nir.channel_count() == 0) {
    throw InvalidArgument("probe inputs must have channels");
  }
}

std::uint64_t sample_sum(const MultiChannelImage& img) {
  std::uint64_t s = 0;
  for (const auto& p : img.planes()) {
    for (Sample v : p) s += v;
  }
  return s;
}

std::uint64_t sample_count(const MultiChannelImage& img) {
  return static_cast<std::uint64_t>(img.pixel_count()) * img.channel_count();
}

int clamp_class(long long c, int num_classes) {
  return static_cast<int>(std::clamp<long long>(c, 0, num_classes - 1));
}

std::string file_stem(const std::string& item_id) {
  std::string out;
  for (char ch : item_id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    out += ok ? ch : '_';
  }
  return out;
}

struct Input {
  std::string item_id;
  const MultiChannelImage* rgb;
  const MultiChannelImage* nir;
};

// Predicts every input and packs the result as a manifest, writing masks
// and the manifest file when an output root is set.
PredictionManifest predict(const ProbeModel& model, Task task, const std::vector<Input>& inputs,
                           PredictionVariant variant, const std::string& seed_id,
                           const ProbeRunOptions& options) {
  PredictionManifest m;
  m.model_id = model.model_id();
  m.variant = variant;
  m.seed_id = seed_id;
  if (task == Task::segmentation && options.out_root.empty()) {
    throw InvalidArgument("segmentation probes need an output directory for masks");
  }
  if (!options.out_root.empty()) m.base_dir = options.out_root / m.relative_path().parent_path();

  std::vector<PredictionRecord> recs(inputs.size());
  parallel_for(inputs.size(), options.threads, [&](std::size_t k) {
    const auto& in = inputs[k];
    if (task == Task::classification) {
      recs[k].pred = probe_classify(model, *in.rgb, *in.nir);
    } else {
      const fs::path rel = fs::path(seed_id) / (file_stem(in.item_id) + ".png");
      save_raster(probe_segment(model, *in.rgb, *in.nir), m.base_dir / rel);
      recs[k].mask_path = rel;
    }
  });
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (!m.records.emplace(inputs[k].item_id, std::move(recs[k])).second) {
      throw InvalidArgument("duplicate item '" + inputs[k].item_id + "'");
    }
  }
  if (!options.out_root.empty()) m.save(options.out_root);
  return m;
}

std::vector<ItemImages> load_all(const DatasetManifest& dataset,
                                 const std::vector<std::size_t>& selected, std::size_t threads) {
  std::vector<ItemImages> images(selected.size());
  parallel_for(selected.size(), threads, [&](std::size_t k) {
    images[k] = load_item_images(dataset, dataset.items[selected[k]]);
  });
  return images;
}

}  // namespace

std::string to_string(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::rgb_mean_bucket:
      return "rgb_mean_bucket";
    case ProbeKind::nir_mean_bucket:
      return "nir_mean_bucket";
    case ProbeKind::blend:
      return "blend";
  }
  return "blend";
}

ProbeKind parse_probe_kind(const std::string& text) {
  if (text == "rgb_mean_bucket") return ProbeKind::rgb_mean_bucket;
  if (text == "nir_mean_bucket") return ProbeKind::nir_mean_bucket;
  if (text == "blend") return ProbeKind::blend;
  throw InvalidArgument("unknown probe '" + text +
                        "' (rgb_mean_bucket|nir_mean_bucket|blend)");
}

std::string ProbeModel::model_id() const { return name.empty() ? to_string(kind) : name; }

void ProbeModel::validate() const {
  if (num_classes < 2) throw InvalidArgument("probe num_classes must be >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("probe alpha must lie in [0, 1]");
  if (!std::isfinite(threshold)) throw InvalidArgument("probe threshold must be finite");
  if (name.find('/') != std::string::npos) throw InvalidArgument("probe name may not contain '/'");
}

int probe_classify(const ProbeModel& model, const MultiChannelImage& rgb,
                   const MultiChannelImage& nir) {
  model.validate();
  check_inputs(rgb, nir);
  const auto nc = static_cast<std::uint64_t>(model.num_classes);
  switch (model.kind) {
    case ProbeKind::rgb_mean_bucket:
      // floor(sum / count * nc / 256) in exact integer arithmetic.
      return clamp_class(static_cast<long long>(sample_sum(rgb) * nc / (256 * sample_count(rgb))),
                         model.num_classes);
    case ProbeKind::nir_mean_bucket:
      return clamp_class(static_cast<long long>(sample_sum(nir) * nc / (256 * sample_count(nir))),
                         model.num_classes);
    case ProbeKind::blend: {
      const double mr = static_cast<double>(sample_sum(rgb)) / static_cast<double>(sample_count(rgb));
      const double mn = static_cast<double>(sample_sum(nir)) / static_cast<double>(sample_count(nir));
      const double v = model.alpha * mn + (1.0 - model.alpha) * mr;
      return clamp_class(static_cast<long long>(std::floor(v * model.num_classes / 256.0)),
                         model.num_classes);
    }
  }
  return 0;
}

MultiChannelImage probe_segment(const ProbeModel& model, const MultiChannelImage& rgb,
                                const MultiChannelImage& nir) {
  model.validate();
  check_inputs(rgb, nir);
  if (rgb.width() != nir.width() || rgb.height() != nir.height()) {
    throw InvalidArgument("RGB and NIR shapes differ");
  }
  const std::size_t n = rgb.pixel_count();
  Plane mask(n);
  const auto& rp = rgb.planes();
  const auto nir_plane = nir.plane(0);
  for (std::size_t i = 0; i < n; ++i) {
    double rgb_mean = 0.0;
    for (const auto& p : rp) rgb_mean += p[i];
    rgb_mean /= static_cast<double>(rp.size());
    double v = 0.0;
    switch (model.kind) {
      case ProbeKind::rgb_mean_bucket:
        v = rgb_mean;
        break;
      case ProbeKind::nir_mean_bucket:
        v = nir_plane[i];
        break;
      case ProbeKind::blend:
        v = model.alpha * nir_plane[i] + (1.0 - model.alpha) * rgb_mean;
        break;
    }
    mask[i] = v > model.threshold ? 1 : 0;
  }
  return MultiChannelImage(rgb.width(), rgb.height(), 8, {"L"}, {std::move(mask)});
}

PredictionManifest predict_clean(const ProbeModel& model, const DatasetManifest& dataset,
                                 const ProbeRunOptions& options) {
  const auto selected = dataset.select(options.split);
  const auto images = load_all(dataset, selected, options.threads);
  std::vector<Input> inputs;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    inputs.push_back({dataset.items[selected[k]].item_id, &images[k].rgb, &images[k].nir});
  }
  return predict(model, dataset.task, inputs, PredictionVariant::clean(), options.seed_id,
                 options);
}

std::vector<PredictionManifest> predict_counterfactual(const ProbeModel& model,
                                                       const DatasetManifest& dataset,
                                                       const CounterfactualPlan& plan,
                                                       const ProbeRunOptions& options) {
  plan.validate();
  const auto selected = dataset.select(plan.split);
  if (selected.size() != plan.n_items) {
    throw InvalidArgument("plan size does not match the evaluated split");
  }
  for (std::size_t k = 0; k < plan.item_ids.size(); ++k) {
    if (plan.item_ids[k] != dataset.items[selected[k]].item_id) {
      throw InvalidArgument("plan items do not match the dataset");
    }
  }
  const auto images = load_all(dataset, selected, options.threads);
  std::vector<PredictionManifest> out;
  for (std::size_t p = 0; p < plan.permutations.size(); ++p) {
    const auto& perm = plan.permutations[p];
    std::vector<Input> inputs;
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const bool nir_shuffled = plan.channel == ShuffleChannel::nir;
      const auto& rgb = images[nir_shuffled ? k : perm[k]].rgb;
      const auto& nir = images[nir_shuffled ? perm[k] : k].nir;
      inputs.push_back({dataset.items[selected[k]].item_id, &rgb, &nir});
    }
    out.push_back(predict(model, dataset.task, inputs,
                          PredictionVariant::counterfactual(plan.channel, p), options.seed_id,
                          options));
  }
  return out;
}

std::vector<PredictionManifest> predict_corrupted(const ProbeModel& model,
                                                  const DatasetManifest& dataset,
                                                  const std::vector<VariantRecord>& variants,
                                                  const ProbeRunOptions& options) {
  using Key = std::tuple<int, int, int, std::uint64_t>;
  std::map<Key, std::vector<const VariantRecord*>> groups;
  for (const auto& v : variants) {
    groups[{static_cast<int>(v.kind), v.severity, static_cast<int>(v.target), v.seed}].push_back(&v);
  }
  std::vector<PredictionManifest> out;
  for (const auto& [key, recs] : groups) {
    std::vector<ItemImages> images(recs.size());
    parallel_for(recs.size(), options.threads, [&](std::size_t k) {
      images[k].rgb = load_raster(recs[k]->rgb_path);
      images[k].nir = load_raster(recs[k]->nir_path);
    });
    std::vector<Input> inputs;
    for (std::size_t k = 0; k < recs.size(); ++k) {
      inputs.push_back({recs[k]->item_id, &images[k].rgb, &images[k].nir});
    }
    const auto* first = recs.front();
    out.push_back(predict(model, dataset.task, inputs,
                          PredictionVariant::corrupted(first->kind, first->severity, first->target),
                          std::to_string(first->seed), options));
  }
  return out;
}

std::vector<PredictionManifest> run_probe_evaluation(const ProbeModel& model,
                                                     const DatasetManifest& dataset,
                                                     const CounterfactualPlan* plan,
                                                     const std::vector<VariantRecord>* variants,
                                                     const ProbeRunOptions& options) {
  model.validate();
  std::vector<PredictionManifest> out;
  out.push_back(predict_clean(model, dataset, options));
  if (plan) {
    for (auto& m : predict_counterfactual(model, dataset, *plan, options)) out.push_back(std::move(m));
  }
  if (variants) {
    for (auto& m : predict_corrupted(model, dataset, *variants, options)) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace specband
