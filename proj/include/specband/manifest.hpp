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

#ifndef SPECBAND_MANIFEST_HPP
#define SPECBAND_MANIFEST_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specband/image.hpp"

namespace specband {

enum class Task { classification, segmentation };

enum class Split { train, val, test };

inline constexpr Split kAllSplits[] = {Split::train, Split::val, Split::test};

std::string to_string(Task task);
std::string to_string(Split split);
Task parse_task(const std::string& text);
Split parse_split(const std::string& text);

/// One labelled (RGB, NIR, y) example.
struct ManifestItem {
  std::string item_id;
  std::filesystem::path rgb_path;
  std::filesystem::path nir_path;
  std::optional<int> label;           // classification
  std::filesystem::path mask_path;    // segmentation
  std::string scene_id;
  std::optional<Split> split;

  friend bool operator==(const ManifestItem&, const ManifestItem&) = default;
};

struct DatasetManifest {
  Task task = Task::classification;
  std::vector<std::string> label_set;
  std::vector<int> excluded_class_ids;
  std::vector<ManifestItem> items;
  /// Directory relative item paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  /// Throws InvalidArgument on duplicate ids, labels outside the label set,
  /// excluded ids outside the label set, or missing label/mask fields.
  void validate() const;

  std::filesystem::path resolve(const std::filesystem::path& p) const;

  /// Indices of items in `split`, in manifest order; nullopt selects all.
  std::vector<std::size_t> select(const std::optional<Split>& split) const;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& doc,
                                   const std::filesystem::path& base_dir = {});
  static DatasetManifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.task == b.task && a.label_set == b.label_set &&
           a.excluded_class_ids == b.excluded_class_ids && a.items == b.items;
  }
};

/// Loaded pixels of one item.
struct ItemImages {
  MultiChannelImage rgb;
  MultiChannelImage nir;
};

ItemImages load_item_images(const DatasetManifest& manifest, const ManifestItem& item);

}  // namespace specband

#endif  // SPECBAND_MANIFEST_HPP
