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

#include "specband/manifest.hpp"

#include <fstream>
#include <set>

#include "specband/error.hpp"
#include "specband/png_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {

std::string to_string(Task task) {
  return task == Task::classification ? "classification" : "segmentation";
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Task parse_task(const std::string& text) {
  if (text == "classification") return Task::classification;
  if (text == "segmentation") return Task::segmentation;
  throw InvalidArgument("unknown task '" + text + "'");
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::train;
  if (text == "val") return Split::val;
  if (text == "test") return Split::test;
  throw InvalidArgument("unknown split '" + text + "'");
}

void DatasetManifest::validate() const {
  const int n_labels = static_cast<int>(label_set.size());
  for (int id : excluded_class_ids) {
    if (id < 0 || id >= n_labels) {
      throw InvalidArgument("excluded class id " + std::to_string(id) + " not in label set");
    }
  }
  std::set<std::string> ids;
  for (const auto& item : items) {
    if (item.item_id.empty()) throw InvalidArgument("item with empty id");
    if (!ids.insert(item.item_id).second) {
      throw InvalidArgument("duplicate item id '" + item.item_id + "'");
    }
    if (task == Task::classification) {
      if (!item.label) throw InvalidArgument("item '" + item.item_id + "' has no label");
      if (n_labels > 0 && (*item.label < 0 || *item.label >= n_labels)) {
        throw InvalidArgument("item '" + item.item_id + "' label outside label set");
      }
    } else if (item.mask_path.empty()) {
      throw InvalidArgument("item '" + item.item_id + "' has no mask_path");
    }
  }
}

fs::path DatasetManifest::resolve(const fs::path& p) const {
  if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::vector<std::size_t> DatasetManifest::select(const std::optional<Split>& split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!split || items[i].split == split) out.push_back(i);
  }
  return out;
}

json DatasetManifest::to_json() const {
  json out_items = json::array();
  for (const auto& item : items) {
    json j = {{"item_id", item.item_id},
              {"rgb_path", item.rgb_path.generic_string()},
              {"nir_path", item.nir_path.generic_string()},
              {"scene_id", item.scene_id}};
    if (item.label) j["label"] = *item.label;
    if (!item.mask_path.empty()) j["mask_path"] = item.mask_path.generic_string();
    if (item.split) j["split"] = to_string(*item.split);
    out_items.push_back(std::move(j));
  }
  return {{"task", to_string(task)},
          {"label_set", label_set},
          {"excluded_class_ids", excluded_class_ids},
          {"items", out_items}};
}

DatasetManifest DatasetManifest::from_json(const json& doc, const fs::path& base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.task = parse_task(doc.at("task").get<std::string>());
    m.label_set = doc.value("label_set", std::vector<std::string>{});
    m.excluded_class_ids = doc.value("excluded_class_ids", std::vector<int>{});
    for (const auto& j : doc.at("items")) {
      ManifestItem item;
      item.item_id = j.at("item_id").get<std::string>();
      item.rgb_path = j.at("rgb_path").get<std::string>();
      item.nir_path = j.at("nir_path").get<std::string>();
      if (j.contains("label") && !j["label"].is_null()) item.label = j["label"].get<int>();
      if (j.contains("mask_path")) item.mask_path = j["mask_path"].get<std::string>();
      item.scene_id = j.value("scene_id", std::string{});
      if (j.contains("split") && !j["split"].is_null()) {
        item.split = parse_split(j["split"].get<std::string>());
      }
      m.items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset manifest: ") + e.what());
  }
  m.validate();
  return m;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
  return from_json(doc, path.parent_path());
}

void DatasetManifest::save(const fs::path& path) const {
  validate();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
}

ItemImages load_item_images(const DatasetManifest& manifest, const ManifestItem& item) {
  return {load_raster(manifest.resolve(item.rgb_path)),
          load_raster(manifest.resolve(item.nir_path))};
}

}  // namespace specband
