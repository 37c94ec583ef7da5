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

#ifndef SPECBAND_METRICS_HPP
#define SPECBAND_METRICS_HPP

// Accuracy functions, counterfactual channel-shuffle plans, perceptual
// scores, prediction manifests and robustness aggregation.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specband/corruptions.hpp"
#include "specband/image.hpp"
#include "specband/manifest.hpp"

namespace specband {

// --- accuracy -------------------------------------------------------------

using LabelMap = std::map<std::string, int>;

/// Fraction of keys whose prediction equals the label. Key sets must match.
double zero_one_accuracy(const LabelMap& preds, const LabelMap& labels);

using ConfusionMatrix = std::vector<std::vector<std::uint64_t>>;

/// M[label][pred] counts over matching keys.
ConfusionMatrix confusion_matrix(const LabelMap& preds, const LabelMap& labels, int num_classes);

/// Frequency of the most common label; ties go to the lowest class id.
double majority_vote_accuracy(std::span<const int> labels);
double majority_vote_accuracy(const LabelMap& labels);

struct IouResult {
  /// nullopt where the class never occurs in either mask.
  std::vector<std::optional<double>> per_class;
  /// Mean over defined, non-excluded classes; nullopt if there are none.
  std::optional<double> mean;
};

/// Integer intersection/union counts, pooled over any number of mask pairs.
class IouAccumulator {
 public:
  IouAccumulator(int num_classes, std::set<int> excluded = {});

  void add(std::span<const Sample> pred, std::span<const Sample> label);
  void add(const IouAccumulator& other);

  IouResult result() const;

  const std::vector<std::uint64_t>& intersections() const { return inter_; }
  const std::vector<std::uint64_t>& unions() const { return union_; }

 private:
  int num_classes_;
  std::set<int> excluded_;
  std::vector<std::uint64_t> inter_;
  std::vector<std::uint64_t> union_;
};

IouResult iou(std::span<const Sample> pred, std::span<const Sample> label, int num_classes,
              const std::set<int>& excluded = {});

/// Single-channel masks of equal shape.
IouResult iou(const MultiChannelImage& pred, const MultiChannelImage& label, int num_classes,
              const std::set<int>& excluded = {});

enum class IouAggregation { pooled, per_item };

struct AccuracyFunction {
  Task task = Task::classification;
  int num_classes = 0;
  std::set<int> excluded_class_ids;
  IouAggregation aggregation = IouAggregation::pooled;

  static AccuracyFunction for_manifest(const DatasetManifest& manifest);
};

// --- counterfactual plans ------------------------------------------------------

enum class ShuffleChannel { rgb, nir };

std::string to_string(ShuffleChannel channel);
ShuffleChannel parse_shuffle_channel(const std::string& text);

/// Default number of permutations per plan.
inline constexpr std::size_t kDefaultPermutations = 10;

struct CounterfactualPlan {
  ShuffleChannel channel = ShuffleChannel::nir;
  std::uint64_t seed = 0;
  std::size_t n_items = 0;
  /// Items the indices refer to, in order; empty when the plan was made for
  /// bare indices.
  std::vector<std::string> item_ids;
  std::optional<Split> split;
  std::vector<std::vector<std::size_t>> permutations;

  /// Throws InvalidArgument unless every list is a bijection on 0..n-1.
  void validate() const;

  nlohmann::json to_json() const;
  static CounterfactualPlan from_json(const nlohmann::json& doc);
  static CounterfactualPlan load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// k uniform permutations of 0..n-1 drawn by Fisher-Yates from one
/// xoshiro256++ stream seeded with `seed`.
CounterfactualPlan make_counterfactual_plan(std::size_t n_items, ShuffleChannel channel,
                                            std::size_t k, std::uint64_t seed);

/// Plan over the items of `split` (all items when nullopt), in manifest order.
CounterfactualPlan make_counterfactual_plan(const DatasetManifest& manifest,
                                            const std::optional<Split>& split,
                                            ShuffleChannel channel, std::size_t k,
                                            std::uint64_t seed);

// --- perceptual score ---------------------------------------------------------

struct PerceptualScoreResult {
  ShuffleChannel channel = ShuffleChannel::nir;
  double acc_clean = 0.0;
  std::vector<double> shuffled_accs;
  double baseline_acc = 0.0;
  double ps_model = 0.0;
  double ps_task = 0.0;
  std::vector<double> per_permutation_model;
  std::vector<double> per_permutation_task;
};

PerceptualScoreResult perceptual_score(double acc_clean, std::span<const double> shuffled_accs,
                                       double baseline_acc,
                                       ShuffleChannel channel = ShuffleChannel::nir);

// --- prediction manifests -----------------------------------------------------

/// Which inputs a prediction set was computed on.
struct PredictionVariant {
  enum class Type { clean, corrupted, counterfactual };

  Type type = Type::clean;
  CorruptionKind kind = CorruptionKind::gaussian_noise;
  int severity = 0;
  CorruptionTarget target = CorruptionTarget::both;
  ShuffleChannel channel = ShuffleChannel::nir;
  std::size_t permutation = 0;

  static PredictionVariant clean();
  static PredictionVariant corrupted(CorruptionKind kind, int severity, CorruptionTarget target);
  static PredictionVariant counterfactual(ShuffleChannel channel, std::size_t permutation);

  /// "clean", "corrupted-<kind>-s<severity>-<target>" or "cf-<channel>-p<index>".
  std::string to_string() const;
  static PredictionVariant parse(const std::string& text);

  friend bool operator==(const PredictionVariant& a, const PredictionVariant& b) {
    return a.to_string() == b.to_string();
  }
};

struct PredictionRecord {
  std::optional<int> pred;
  std::filesystem::path mask_path;
};

struct PredictionManifest {
  std::string model_id;
  PredictionVariant variant;
  std::string seed_id = "0";
  std::map<std::string, PredictionRecord> records;
  /// Directory relative mask paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  /// <model_id>/<variant>/<seed_id>.jsonl
  std::filesystem::path relative_path() const;

  /// Writes the JSON-lines file under `root`; returns its path.
  std::filesystem::path save(const std::filesystem::path& root) const;

  /// Model, variant and seed are taken from the path layout.
  static PredictionManifest load(const std::filesystem::path& path);

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Every manifest under `root` following the naming convention, sorted by
/// (model, variant, seed).
std::vector<PredictionManifest> load_prediction_dir(const std::filesystem::path& root);

/// Accuracy of one prediction set over the dataset items of `split`
/// (all items when nullopt). Throws InvalidArgument naming missing ids.
double evaluate_manifest(const DatasetManifest& dataset, const PredictionManifest& predictions,
                         const AccuracyFunction& acc_fn,
                         const std::optional<Split>& split = std::nullopt);

/// Naive-baseline accuracy for task normalization: majority vote for
/// classification; for segmentation the score of predicting the most
/// frequent pixel class everywhere.
double baseline_accuracy(const DatasetManifest& dataset, const AccuracyFunction& acc_fn,
                         const std::optional<Split>& split = std::nullopt);

/// Perceptual scores aggregated over seed replicates.
struct PerceptualScoreSummary {
  std::string model_id;
  ShuffleChannel channel = ShuffleChannel::nir;
  std::size_t n_seeds = 0;
  std::size_t n_permutations = 0;
  double acc_clean = 0.0;
  double acc_shuffled = 0.0;
  double baseline_acc = 0.0;
  double ps_model = 0.0;
  double ps_model_ci = 0.0;  // CI half-width across seeds
  double ps_task = 0.0;
  double ps_task_ci = 0.0;
  std::vector<PerceptualScoreResult> per_seed;
};

/// For each model: one score per seed replicate, from the clean manifest and
/// the counterfactual manifests of every plan permutation.
std::vector<PerceptualScoreSummary> score_predictions(
    const DatasetManifest& dataset, const CounterfactualPlan& plan,
    const std::vector<PredictionManifest>& manifests, const AccuracyFunction& acc_fn);

// --- robustness -----------------------------------------------------------

struct RobustnessRecord {
  std::string model_id;
  /// nullopt for clean records (severity 0).
  std::optional<CorruptionKind> kind;
  int severity = 0;
  CorruptionTarget target = CorruptionTarget::both;
  std::string seed_id = "0";
  double accuracy = 0.0;
};

struct CurvePoint {
  int severity = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_seeds = 0;
};

struct RobustnessCurve {
  std::string model_id;
  CorruptionTarget target = CorruptionTarget::both;
  std::vector<CurvePoint> points;  // ascending severity
};

/// Normal-approximation half-width 1.96 * sample_sd / sqrt(n); 0 for n < 2.
double ci_half_width(std::span<const double> values);

/// One curve per (model, target), sorted. Per severity the value is the mean
/// over kinds within each seed, then the mean over seeds. Clean records
/// (severity 0) anchor every target curve of their model.
std::vector<RobustnessCurve> robustness_curves(const std::vector<RobustnessRecord>& records);

/// Scores every clean and corrupted manifest against the dataset.
std::vector<RobustnessRecord> robustness_records(const DatasetManifest& dataset,
                                                 const std::vector<PredictionManifest>& manifests,
                                                 const AccuracyFunction& acc_fn,
                                                 const std::optional<Split>& split = std::nullopt);

}  // namespace specband

#endif  // SPECBAND_METRICS_HPP
