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

#ifndef SPECBAND_DATASET_HPP
#define SPECBAND_DATASET_HPP

// Dataset construction: object chips from bounding boxes, fixed-size scene
// tiles, scene-level metadata-balanced splits and channel statistics.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specband/image.hpp"
#include "specband/manifest.hpp"

namespace specband {

struct Annotation {
  Rect bbox;
  int label = 0;
};

struct SceneMetadata {
  std::string location;
  double view_angle = 0.0;
  double azimuth = 0.0;
  std::optional<double> sun_elevation;
};

struct SceneRecord {
  std::string scene_id;
  std::filesystem::path image_path;
  std::filesystem::path pan_path;
  SceneMetadata metadata;
  std::vector<Annotation> annotations;
  std::filesystem::path mask_path;
  /// Explicit item count (e.g. tiles); falls back to the annotation count,
  /// then 1.
  std::optional<std::size_t> item_count;

  std::size_t weight() const;

  nlohmann::json to_json() const;
  static SceneRecord from_json(const nlohmann::json& j);
};

/// Reads {"scenes": [...]} or a bare array; relative paths are resolved
/// against the file's directory.
std::vector<SceneRecord> load_scenes(const std::filesystem::path& path);

// --- chipping -----------------------------------------------------------

struct Chip {
  MultiChannelImage image;
  int label = 0;
  Rect rect;  // region cut from the scene after padding and clamping
};

/// Expands `bbox` by pad_fraction of its size on each side and clamps it to
/// the image. Throws InvalidArgument for empty boxes or boxes entirely
/// outside the image.
Rect expand_bbox(const Rect& bbox, double pad_fraction, std::size_t width, std::size_t height);

std::vector<Chip> chip_scene(const MultiChannelImage& scene,
                             std::span<const Annotation> annotations, double pad_fraction = 0.0);

/// Default minimum per-class example count for chip datasets.
inline constexpr std::size_t kDefaultMinClassCount = 10;

/// Classes occurring fewer than min_count times.
std::set<int> rare_classes(std::span<const int> labels, std::size_t min_count);

// --- tiling -------------------------------------------------------------

struct Tile {
  MultiChannelImage image;
  std::optional<MultiChannelImage> mask;
  std::size_t col = 0;
  std::size_t row = 0;
  Rect rect;
};

/// floor(W/tile) x floor(H/tile) non-overlapping tiles in row-major order;
/// partial strips on the right and bottom are dropped.
std::vector<Tile> tile_scene(const MultiChannelImage& scene, std::size_t tile,
                             const std::optional<MultiChannelImage>& mask = std::nullopt);

// --- splits -------------------------------------------------------------

enum class WeightBy { scene_count, item_count };

WeightBy parse_weight_by(const std::string& text);

struct SplitOptions {
  std::array<double, 3> fractions = {0.7, 0.1, 0.2};
  std::uint64_t seed = 0;
  WeightBy weight_by = WeightBy::scene_count;
  /// Weight of the metadata divergence term.
  double lambda = 1.0;
  double view_angle_bin = 10.0;
  double azimuth_bin = 45.0;
  double sun_elevation_bin = 10.0;
  /// Upper bound on local-search passes after the greedy pass.
  int max_passes = 50;
};

struct SplitAssignment {
  std::map<std::string, Split> assignment;
  std::array<double, 3> target_fractions{};
  std::array<double, 3> achieved_fractions{};
  /// Mean total-variation distance between each split's histogram and the
  /// whole-collection histogram, per metadata property.
  std::map<std::string, double> divergence;
  double objective = 0.0;

  Split of(const std::string& scene_id) const;

  nlohmann::json to_json() const;
  static SplitAssignment from_json(const nlohmann::json& doc);
  static SplitAssignment load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Integer split sizes by largest remainder (ties to the earlier split).
std::array<std::size_t, 3> largest_remainder_sizes(std::size_t count,
                                                   const std::array<double, 3>& fractions);

/// Objective of a complete assignment, `splits[i]` belonging to `scenes[i]`:
/// sum_s |W_s - T_s| / W + lambda * sum_p divergence_p.
double split_objective(const std::vector<SceneRecord>& scenes, const std::vector<Split>& splits,
                       const SplitOptions& options);

/// Greedy assignment in descending-weight order followed by move/swap local
/// search on the same objective. Deterministic in (scene set, options);
/// independent of input order.
SplitAssignment assign_splits(const std::vector<SceneRecord>& scenes, const SplitOptions& options);

// --- manifests and statistics ----------------------------------------------

/// Items inherit the split of their parent scene; throws when a scene is
/// unassigned or ids collide. Writes the manifest when out_path is non-empty.
DatasetManifest write_manifest(std::vector<ManifestItem> items, const SplitAssignment& splits,
                               Task task, std::vector<std::string> label_set,
                               std::vector<int> excluded_class_ids,
                               const std::filesystem::path& out_path);

struct ChannelStats {
  std::vector<std::string> channels;
  std::vector<double> mean;
  std::vector<double> stddev;  // population
  std::uint64_t samples_per_channel = 0;

  nlohmann::json to_json() const;
};

/// Mean and population standard deviation of sample/255 per channel (RGB
/// channels, then NIR) over every item in the split; nullopt uses all items.
ChannelStats compute_channel_stats(const DatasetManifest& manifest, const std::optional<Split>& split);

}  // namespace specband

#endif  // SPECBAND_DATASET_HPP
