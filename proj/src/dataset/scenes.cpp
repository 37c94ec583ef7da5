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

#include <cmath>
#include <fstream>
#include <map>

#include "specband/dataset.hpp"
#include "specband/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {

std::size_t SceneRecord::weight() const {
  if (item_count) return *item_count;
  return annotations.empty() ? 1 : annotations.size();
}

json SceneRecord::to_json() const {
  json anns = json::array();
  for (const auto& a : annotations) {
    anns.push_back({{"bbox", {a.bbox.x, a.bbox.y, a.bbox.width, a.bbox.height}},
                    {"label", a.label}});
  }
  json meta = {{"location", metadata.location},
               {"view_angle", metadata.view_angle},
               {"azimuth", metadata.azimuth}};
  if (metadata.sun_elevation) meta["sun_elevation"] = *metadata.sun_elevation;
  json j = {{"scene_id", scene_id},
            {"image", image_path.generic_string()},
            {"metadata", meta},
            {"annotations", anns}};
  if (!pan_path.empty()) j["pan"] = pan_path.generic_string();
  if (!mask_path.empty()) j["mask"] = mask_path.generic_string();
  if (item_count) j["item_count"] = *item_count;
  return j;
}

SceneRecord SceneRecord::from_json(const json& j) {
  SceneRecord s;
  try {
    s.scene_id = j.at("scene_id").get<std::string>();
    s.image_path = j.value("image", std::string{});
    s.pan_path = j.value("pan", std::string{});
    s.mask_path = j.value("mask", std::string{});
    if (j.contains("metadata")) {
      const auto& m = j["metadata"];
      s.metadata.location = m.value("location", std::string{});
      s.metadata.view_angle = m.value("view_angle", 0.0);
      s.metadata.azimuth = m.value("azimuth", 0.0);
      if (m.contains("sun_elevation") && !m["sun_elevation"].is_null()) {
        s.metadata.sun_elevation = m["sun_elevation"].get<double>();
      }
    }
    if (j.contains("annotations")) {
      for (const auto& a : j["annotations"]) {
        const auto box = a.at("bbox").get<std::vector<std::size_t>>();
        if (box.size() != 4) throw FormatError("bbox needs [x, y, width, height]");
        s.annotations.push_back({{box[0], box[1], box[2], box[3]}, a.at("label").get<int>()});
      }
    }
    if (j.contains("item_count")) s.item_count = j["item_count"].get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene record: ") + e.what());
  }
  if (s.scene_id.empty()) throw FormatError("scene record with empty scene_id");
  return s;
}

std::vector<SceneRecord> load_scenes(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenes file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
  const json& list = doc.is_array() ? doc : doc.at("scenes");
  std::vector<SceneRecord> scenes;
  const fs::path base = path.parent_path();
  auto fix = [&base](fs::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  for (const auto& j : list) {
    auto s = SceneRecord::from_json(j);
    fix(s.image_path);
    fix(s.pan_path);
    fix(s.mask_path);
    scenes.push_back(std::move(s));
  }
  return scenes;
}

Rect expand_bbox(const Rect& bbox, double pad_fraction, std::size_t width, std::size_t height) {
  if (bbox.width == 0 || bbox.height == 0) throw InvalidArgument("empty bounding box");
  if (bbox.x >= width || bbox.y >= height) {
    throw InvalidArgument("bounding box lies entirely outside the scene");
  }
  if (pad_fraction < 0.0) throw InvalidArgument("pad_fraction must be >= 0");
  const double px = pad_fraction * static_cast<double>(bbox.width);
  const double py = pad_fraction * static_cast<double>(bbox.height);
  const double x0 = std::max(0.0, std::floor(static_cast<double>(bbox.x) - px));
  const double y0 = std::max(0.0, std::floor(static_cast<double>(bbox.y) - py));
  const double x1 = std::min(static_cast<double>(width),
                             std::ceil(static_cast<double>(bbox.x + bbox.width) + px));
  const double y1 = std::min(static_cast<double>(height),
                             std::ceil(static_cast<double>(bbox.y + bbox.height) + py));
  return {static_cast<std::size_t>(x0), static_cast<std::size_t>(y0),
          static_cast<std::size_t>(x1 - x0), static_cast<std::size_t>(y1 - y0)};
}

std::vector<Chip> chip_scene(const MultiChannelImage& scene,
                             std::span<const Annotation> annotations, double pad_fraction) {
  std::vector<Chip> chips;
  chips.reserve(annotations.size());
  for (const auto& ann : annotations) {
    const Rect r = expand_bbox(ann.bbox, pad_fraction, scene.width(), scene.height());
    chips.push_back({crop(scene, r), ann.label, r});
  }
  return chips;
}

std::set<int> rare_classes(std::span<const int> labels, std::size_t min_count) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::set<int> out;
  for (const auto& [label, n] : counts) {
    if (n < min_count) out.insert(label);
  }
  return out;
}

std::vector<Tile> tile_scene(const MultiChannelImage& scene, std::size_t tile,
                             const std::optional<MultiChannelImage>& mask) {
  if (tile == 0) throw InvalidArgument("tile size must be >= 1");
  if (mask && (mask->width() != scene.width() || mask->height() != scene.height())) {
    throw InvalidArgument("mask and image shapes differ");
  }
  const std::size_t cols = scene.width() / tile;
  const std::size_t rows = scene.height() / tile;
  std::vector<Tile> tiles;
  tiles.reserve(cols * rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Rect rect{c * tile, r * tile, tile, tile};
      Tile t{crop(scene, rect), std::nullopt, c, r, rect};
      if (mask) t.mask = crop(*mask, rect);
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

}  // namespace specband
