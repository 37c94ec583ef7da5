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

#ifndef SPECBAND_CORRUPTIONS_HPP
#define SPECBAND_CORRUPTIONS_HPP

// Severity-graded naturalistic corruptions (noise, blur, weather, digital)
// for 3-channel 8-bit images of arbitrary size, and their application to
// RGB+NIR pairs where NIR is corrupted as three stacked copies.
//
// Every corruption is a pure function of (pixels, kind, severity, seed).
// Pixel arithmetic runs in double precision on [0, 1] and is re-quantized
// once at the end with round-half-to-even.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specband/image.hpp"
#include "specband/manifest.hpp"

namespace specband {

enum class CorruptionKind {
  gaussian_noise,
  shot_noise,
  impulse_noise,
  defocus_blur,
  glass_blur,
  motion_blur,
  zoom_blur,
  snow,
  frost,
  fog,
  brightness,
  contrast,
  elastic_transform,
  pixelate,
  jpeg_compression,
};

inline constexpr std::size_t kCorruptionKindCount = 15;
inline constexpr int kMaxSeverity = 5;
/// Smallest width/height any corruption accepts.
inline constexpr std::size_t kMinCorruptionSize = 32;

enum class CorruptionFamily { noise, blur, weather, digital };
enum class RandomnessPolicy { shared, independent };
enum class CorruptionTarget { rgb, nir, both };

struct CatalogEntry {
  CorruptionKind kind;
  CorruptionFamily family;
  RandomnessPolicy policy;
};

/// All kinds in declaration order. Per-pixel noise processes draw
/// independent randomness per channel group; everything else is shared.
const std::array<CatalogEntry, kCorruptionKindCount>& corruption_catalog();
const CatalogEntry& catalog_entry(CorruptionKind kind);

std::string to_string(CorruptionKind kind);
std::string to_string(CorruptionFamily family);
std::string to_string(RandomnessPolicy policy);
std::string to_string(CorruptionTarget target);
CorruptionKind parse_corruption_kind(const std::string& text);
RandomnessPolicy parse_randomness_policy(const std::string& text);
CorruptionTarget parse_corruption_target(const std::string& text);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::gaussian_noise;
  int severity = 1;
  CorruptionTarget target = CorruptionTarget::both;
  std::uint64_t seed = 0;
  /// Overrides the catalog default when set.
  std::optional<RandomnessPolicy> policy;

  RandomnessPolicy effective_policy() const;
  void validate() const;
};

/// Per-kind, per-severity parameter tuples. Each kind has a fixed arity
/// (param_count); overrides with another arity are rejected.
class SeverityTable {
 public:
  static const SeverityTable& defaults();

  /// Defaults with the entries present in `doc` replaced. `doc` maps kind
  /// names to five parameter arrays (scalars accepted for 1-parameter kinds).
  static SeverityTable from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  static std::size_t param_count(CorruptionKind kind);

  std::span<const double> params(CorruptionKind kind, int severity) const;
  void set(CorruptionKind kind, int severity, std::vector<double> values);

 private:
  std::array<std::array<std::vector<double>, kMaxSeverity>, kCorruptionKindCount> table_;
};

/// Corrupts a 3-channel 8-bit image. Throws InvalidArgument for other
/// channel counts/bit depths, severities outside 1..5, or images smaller than
/// kMinCorruptionSize on either side.
MultiChannelImage apply_corruption(const MultiChannelImage& img, CorruptionKind kind,
                                   int severity, std::uint64_t seed,
                                   const SeverityTable& table = SeverityTable::defaults());

/// Group tags mixed into derived seeds.
inline constexpr std::uint64_t kSharedGroupTag = 0;
inline constexpr std::uint64_t kRgbGroupTag = 1;
inline constexpr std::uint64_t kNirGroupTag = 2;

struct CorruptedPair {
  MultiChannelImage rgb;
  MultiChannelImage nir;
};

/// Corrupts the targeted groups of an RGB+NIR pair. NIR is corrupted as a
/// three-plane stack and collapsed by taking plane 0. Seeds per group are
/// derive_seed(spec.seed, item_hash, tag) with the shared tag under the
/// shared policy and per-group tags otherwise.
CorruptedPair corrupt_multispectral(const MultiChannelImage& rgb, const MultiChannelImage& nir,
                                    const CorruptionSpec& spec,
                                    const SeverityTable& table = SeverityTable::defaults(),
                                    std::uint64_t item_hash = 0);

/// Peak signal-to-noise ratio in dB over all samples; +inf when identical.
double psnr(const MultiChannelImage& a, const MultiChannelImage& b);

/// One line of the variant manifest (JSON lines).
struct VariantRecord {
  std::string item_id;
  CorruptionKind kind = CorruptionKind::gaussian_noise;
  int severity = 1;
  CorruptionTarget target = CorruptionTarget::both;
  std::uint64_t seed = 0;
  std::filesystem::path rgb_path;
  std::filesystem::path nir_path;

  nlohmann::json to_json() const;
  static VariantRecord from_json(const nlohmann::json& j);

  friend bool operator==(const VariantRecord&, const VariantRecord&) = default;
};

inline constexpr const char* kVariantManifestName = "variants.jsonl";

struct CorruptDatasetOptions {
  std::size_t threads = 1;
  /// Restrict to one split; nullopt corrupts every item.
  std::optional<Split> split;
};

struct CorruptDatasetResult {
  DatasetManifest manifest;
  /// Ordered by (spec, item) regardless of scheduling.
  std::vector<VariantRecord> variants;
  /// "item_id: message" for every failed job.
  std::vector<std::string> failures;
};

/// Writes corrupted images for every (item, spec) pair under
/// out_dir/<kind>/s<severity>/<target>/<seed>/ and the variant manifest
/// out_dir/variants.jsonl. Untargeted groups reference the source image.
/// Paths in the written manifest are relative to out_dir where they point
/// inside it; the returned records carry out_dir-prefixed paths.
CorruptDatasetResult corrupt_dataset(const DatasetManifest& manifest,
                                     const std::vector<CorruptionSpec>& specs,
                                     const std::filesystem::path& out_dir,
                                     const SeverityTable& table = SeverityTable::defaults(),
                                     const CorruptDatasetOptions& options = {});

std::vector<VariantRecord> load_variant_records(const std::filesystem::path& path);

}  // namespace specband

#endif  // SPECBAND_CORRUPTIONS_HPP
