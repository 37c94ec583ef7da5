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

#ifndef SPECBAND_TESTS_TEST_UTIL_HPP
#define SPECBAND_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specband/image.hpp"
#include "specband/manifest.hpp"
#include "specband/png_io.hpp"

namespace specband::testing {

namespace fs = std::filesystem;

/// Directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("specband_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

using PixelFn = std::function<Sample(std::size_t c, std::size_t x, std::size_t y)>;

inline MultiChannelImage make_image(std::size_t w, std::size_t h,
                                    std::vector<std::string> names, const PixelFn& fn,
                                    int bit_depth = 8) {
  std::vector<Plane> planes(names.size(), Plane(w * h));
  for (std::size_t c = 0; c < names.size(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) planes[c][y * w + x] = fn(c, x, y);
    }
  }
  return MultiChannelImage(w, h, bit_depth, std::move(names), std::move(planes));
}

inline MultiChannelImage random_image(std::size_t w, std::size_t h,
                                      std::vector<std::string> names, std::uint32_t seed,
                                      int bit_depth = 8) {
  std::mt19937 gen(seed);
  const unsigned max = (1u << bit_depth) - 1u;
  std::uniform_int_distribution<unsigned> dist(0, max);
  return make_image(w, h, std::move(names),
                    [&](std::size_t, std::size_t, std::size_t) {
                      return static_cast<Sample>(dist(gen));
                    },
                    bit_depth);
}

/// Smooth gradients plus a few hard-edged shapes and mild texture: enough
/// structure for blur and weather corruptions to remove information.
inline MultiChannelImage photo_like(std::size_t w, std::size_t h, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fx = 1.0 + 4.0 * u(gen), fy = 1.0 + 4.0 * u(gen);
  const double phase = 6.283 * u(gen);
  const double base[3] = {60 + 120 * u(gen), 60 + 120 * u(gen), 60 + 120 * u(gen)};
  struct Disc {
    double cx, cy, r, v[3];
  };
  std::vector<Disc> discs;
  for (int k = 0; k < 5; ++k) {
    discs.push_back({u(gen) * w, u(gen) * h, 4 + u(gen) * std::min(w, h) / 4.0,
                     {255 * u(gen), 255 * u(gen), 255 * u(gen)}});
  }
  std::vector<double> texture(w * h);
  for (auto& t : texture) t = 24.0 * (u(gen) - 0.5);
  return make_image(w, h, {"R", "G", "B"}, [&](std::size_t c, std::size_t x, std::size_t y) {
    double v = base[c] + 50.0 * std::sin(fx * 6.283 * x / w + phase) *
                             std::cos(fy * 6.283 * y / h + c);
    for (const auto& d : discs) {
      const double dx = x - d.cx, dy = y - d.cy;
      if (dx * dx + dy * dy < d.r * d.r) v = 0.5 * v + 0.5 * d.v[c];
    }
    v += texture[y * w + x];
    return quantize(v, 255);
  });
}

inline MultiChannelImage constant(std::size_t w, std::size_t h, std::vector<std::string> names,
                                  Sample v) {
  return MultiChannelImage::filled(w, h, 8, std::move(names), v);
}

/// Writes a classification dataset: item i gets rgb_fn(i) and nir_fn(i) and
/// label labels[i]. Returns the loaded manifest.
inline DatasetManifest write_dataset(const fs::path& dir, std::size_t n,
                                     const std::function<MultiChannelImage(std::size_t)>& rgb_fn,
                                     const std::function<MultiChannelImage(std::size_t)>& nir_fn,
                                     const std::vector<int>& labels, int num_classes,
                                     const std::vector<std::optional<Split>>& splits = {}) {
  DatasetManifest m;
  m.task = Task::classification;
  for (int c = 0; c < num_classes; ++c) m.label_set.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    ManifestItem item;
    char id[32];
    std::snprintf(id, sizeof id, "item%04zu", i);
    item.item_id = id;
    item.rgb_path = fs::path("img") / (item.item_id + "_rgb.png");
    item.nir_path = fs::path("img") / (item.item_id + "_nir.png");
    save_raster(rgb_fn(i), dir / item.rgb_path);
    save_raster(nir_fn(i), dir / item.nir_path);
    item.label = labels[i];
    item.scene_id = "scene" + std::to_string(i);
    if (!splits.empty()) item.split = splits[i];
    m.items.push_back(item);
  }
  m.save(dir / "manifest.json");
  return DatasetManifest::load(dir / "manifest.json");
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace specband::testing

#endif  // SPECBAND_TESTS_TEST_UTIL_HPP
