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

#include "specband/dataset.hpp"
#include "specband/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {

DatasetManifest write_manifest(std::vector<ManifestItem> items, const SplitAssignment& splits,
                               Task task, std::vector<std::string> label_set,
                               std::vector<int> excluded_class_ids, const fs::path& out_path) {
  for (auto& item : items) {
    if (item.scene_id.empty()) {
      throw InvalidArgument("item '" + item.item_id + "' has no scene_id");
    }
    item.split = splits.of(item.scene_id);
  }
  DatasetManifest m;
  m.task = task;
  m.label_set = std::move(label_set);
  m.excluded_class_ids = std::move(excluded_class_ids);
  m.items = std::move(items);
  m.validate();
  if (!out_path.empty()) {
    m.base_dir = out_path.parent_path();
    m.save(out_path);
  }
  return m;
}

json ChannelStats::to_json() const {
  return {{"channels", channels},
          {"mean", mean},
          {"std", stddev},
          {"samples_per_channel", samples_per_channel}};
}

ChannelStats compute_channel_stats(const DatasetManifest& manifest,
                                   const std::optional<Split>& split) {
  const auto selected = manifest.select(split);
  if (selected.empty()) throw InvalidArgument("no items selected for channel statistics");

  ChannelStats stats;
  std::vector<unsigned __int128> sum_sq;
  std::vector<std::uint64_t> sum;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    const auto images = load_item_images(manifest, manifest.items[selected[k]]);
    std::vector<const MultiChannelImage*> parts = {&images.rgb, &images.nir};
    std::vector<std::string> names;
    for (const auto* img : parts) {
      for (const auto& n : img->channel_names()) names.push_back(n);
    }
    if (k == 0) {
      stats.channels = names;
      sum.assign(names.size(), 0);
      sum_sq.assign(names.size(), 0);
    } else if (names != stats.channels) {
      throw InvalidArgument("item '" + manifest.items[selected[k]].item_id +
                            "' has a different channel layout");
    }
    std::size_t c = 0;
    for (const auto* img : parts) {
      for (std::size_t ch = 0; ch < img->channel_count(); ++ch, ++c) {
        for (Sample v : img->plane(ch)) {
          sum[c] += v;
          sum_sq[c] += static_cast<unsigned __int128>(v) * v;
        }
      }
    }
    stats.samples_per_channel += images.rgb.width() * images.rgb.height();
  }

  const double n = static_cast<double>(stats.samples_per_channel);
  for (std::size_t c = 0; c < stats.channels.size(); ++c) {
    // Exact integer moments; the variance numerator n*sum_sq - sum^2 is
    // formed in 128-bit arithmetic before scaling.
    const unsigned __int128 nn = stats.samples_per_channel;
    const unsigned __int128 s = sum[c];
    const unsigned __int128 num = nn * sum_sq[c] - s * s;
    const double mean = static_cast<double>(sum[c]) / n;
    const double var = static_cast<double>(num) / (n * n);
    stats.mean.push_back(mean / 255.0);
    stats.stddev.push_back(std::sqrt(var) / 255.0);
  }
  return stats;
}

}  // namespace specband
