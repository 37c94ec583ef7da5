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

#ifndef SPECBAND_PROBES_HPP
#define SPECBAND_PROBES_HPP

// Analytic stand-in models whose channel reliance is known by construction.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specband/corruptions.hpp"
#include "specband/image.hpp"
#include "specband/manifest.hpp"
#include "specband/metrics.hpp"

namespace specband {

enum class ProbeKind { rgb_mean_bucket, nir_mean_bucket, blend };

std::string to_string(ProbeKind kind);
ProbeKind parse_probe_kind(const std::string& text);

struct ProbeModel {
  ProbeKind kind = ProbeKind::nir_mean_bucket;
  int num_classes = 2;
  /// NIR weight of the blend probe.
  double alpha = 0.5;
  /// Per-pixel threshold for segmentation.
  double threshold = 128.0;
  /// Model id used in prediction manifests; defaults to the kind name.
  std::string name;

  std::string model_id() const;
  void validate() const;
};

/// Bucket of the designated channel mean: floor(mean * num_classes / 256),
/// clamped to the class range. Inputs must be 8-bit.
int probe_classify(const ProbeModel& model, const MultiChannelImage& rgb,
                   const MultiChannelImage& nir);

/// 8-bit single-channel mask: 1 where the designated per-pixel value (RGB
/// mean, NIR, or their alpha blend) exceeds the threshold, else 0.
MultiChannelImage probe_segment(const ProbeModel& model, const MultiChannelImage& rgb,
                                const MultiChannelImage& nir);

struct ProbeRunOptions {
  std::string seed_id = "0";
  std::optional<Split> split;
  std::size_t threads = 1;
  /// Where manifests (and predicted masks) are written; required for
  /// segmentation, optional otherwise.
  std::filesystem::path out_root;
};

PredictionManifest predict_clean(const ProbeModel& model, const DatasetManifest& dataset,
                                 const ProbeRunOptions& options);

/// One manifest per plan permutation, over the plan's split. Item i is
/// predicted on (rgb_i, nir_sigma(i)) for an NIR plan and on
/// (rgb_sigma(i), nir_i) for an RGB plan.
std::vector<PredictionManifest> predict_counterfactual(const ProbeModel& model,
                                                       const DatasetManifest& dataset,
                                                       const CounterfactualPlan& plan,
                                                       const ProbeRunOptions& options);

/// One manifest per (kind, severity, target, seed) group of variant records;
/// the seed id is the corruption seed.
std::vector<PredictionManifest> predict_corrupted(const ProbeModel& model,
                                                  const DatasetManifest& dataset,
                                                  const std::vector<VariantRecord>& variants,
                                                  const ProbeRunOptions& options);

/// Clean predictions plus any counterfactual and corrupted ones.
std::vector<PredictionManifest> run_probe_evaluation(const ProbeModel& model,
                                                     const DatasetManifest& dataset,
                                                     const CounterfactualPlan* plan,
                                                     const std::vector<VariantRecord>* variants,
                                                     const ProbeRunOptions& options);

}  // namespace specband

#endif  // SPECBAND_PROBES_HPP
