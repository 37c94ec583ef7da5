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

#ifndef SPECBAND_RADIOMETRIC_HPP
#define SPECBAND_RADIOMETRIC_HPP

// Conversion of 16-bit multiband scenes into 8-bit analysis-ready imagery:
// optional weighted Brovey pansharpening, 16->8 bit rescale, gamma encoding
// and a per-channel low-percentile clip followed by a min-max stretch.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specband/image.hpp"

namespace specband {

struct RadiometricConfig {
  double gamma = 2.2;
  double clip_fraction = 0.01;
  /// Empty means uniform 1/B over the multispectral bands.
  std::vector<double> brovey_weights;
  bool pansharpen = false;
  /// Ablation switch: stretch before gamma instead of after.
  bool stretch_before_gamma = false;

  /// Throws InvalidArgument when gamma <= 0, clip_fraction outside [0, 0.5),
  /// or weights negative / not summing to 1 within 1e-12.
  void validate() const;

  static RadiometricConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

MultiChannelImage brovey_pansharpen(const MultiChannelImage& ms, const MultiChannelImage& pan,
                                    const std::vector<double>& weights);

MultiChannelImage rescale_16_to_8(const MultiChannelImage& img);

MultiChannelImage gamma_correct(const MultiChannelImage& img, double gamma);

struct StretchResult {
  MultiChannelImage image;
  /// Names of channels whose clip point equalled their maximum; those
  /// channels are set to 0.
  std::vector<std::string> degenerate_channels;
};

StretchResult percentile_clip_stretch(const MultiChannelImage& img, double clip_fraction);

struct PreprocessResult {
  MultiChannelImage image;
  /// One image per requested output group, in request order.
  std::vector<MultiChannelImage> groups;
  std::vector<std::string> degenerate_channels;
};

PreprocessResult preprocess_scene(const MultiChannelImage& ms,
                                  const std::optional<MultiChannelImage>& pan,
                                  const RadiometricConfig& cfg,
                                  const std::vector<ChannelGroup>& out_groups);

}  // namespace specband

#endif  // SPECBAND_RADIOMETRIC_HPP
