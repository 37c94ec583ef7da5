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

#ifndef SPECBAND_IMAGE_HPP
#define SPECBAND_IMAGE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace specband {

using Sample = std::uint16_t;
using Plane = std::vector<Sample>;

/// Planar N-channel raster. Every plane holds width*height samples in
/// row-major order and every sample fits in bit_depth bits. Instances are
/// immutable once constructed.
class MultiChannelImage {
 public:
  MultiChannelImage() = default;

  /// Validates all invariants; throws InvalidArgument on violation.
  MultiChannelImage(std::size_t width, std::size_t height, int bit_depth,
                    std::vector<std::string> channel_names,
                    std::vector<Plane> planes);

  /// Constant-valued image.
  static MultiChannelImage filled(std::size_t width, std::size_t height,
                                  int bit_depth,
                                  std::vector<std::string> channel_names,
                                  Sample value = 0);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return width_ * height_; }
  int bit_depth() const { return bit_depth_; }
  Sample max_value() const { return static_cast<Sample>((1u << bit_depth_) - 1u); }
  std::size_t channel_count() const { return planes_.size(); }
  bool empty() const { return planes_.empty(); }

  const std::vector<std::string>& channel_names() const { return names_; }
  const std::vector<Plane>& planes() const { return planes_; }
  std::span<const Sample> plane(std::size_t index) const;
  std::span<const Sample> plane(const std::string& name) const;

  /// Index of a named channel; throws InvalidArgument if absent.
  std::size_t channel_index(const std::string& name) const;
  bool has_channel(const std::string& name) const;

  Sample at(std::size_t channel, std::size_t x, std::size_t y) const {
    return planes_[channel][y * width_ + x];
  }

  friend bool operator==(const MultiChannelImage&, const MultiChannelImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  int bit_depth_ = 8;
  std::vector<std::string> names_;
  std::vector<Plane> planes_;
};

/// Named, ordered subset of an image's channels.
struct ChannelGroup {
  std::string name;
  std::vector<std::string> members;
};

ChannelGroup rgb_group();
ChannelGroup nir_group();

/// Parses "name=A,B,C"; a bare "A,B" uses the joined members as the name.
ChannelGroup parse_channel_group(const std::string& text);

/// Pixel rectangle; x/y are the top-left corner.
struct Rect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

MultiChannelImage extract_group(const MultiChannelImage& img, const ChannelGroup& group);
MultiChannelImage replicate_channel(const MultiChannelImage& img, std::size_t copies);
MultiChannelImage take_channel(const MultiChannelImage& img, std::size_t index);

/// Channel-wise concatenation; names must stay unique.
MultiChannelImage stack_channels(const std::vector<MultiChannelImage>& parts);

/// Same pixels under different channel names.
MultiChannelImage rename_channels(const MultiChannelImage& img,
                                  std::vector<std::string> names);

/// Copies the rectangle; throws if it does not lie inside the image.
MultiChannelImage crop(const MultiChannelImage& img, const Rect& rect);

/// Writes `patch` into `canvas` at (x, y); shapes and channel layout must fit.
void paste(std::vector<Plane>& canvas, std::size_t canvas_width,
           const MultiChannelImage& patch, std::size_t x, std::size_t y);

/// Round-half-to-even quantization of a real value clamped to [0, max_value].
inline Sample quantize(double value, Sample max_value) {
  if (!(value > 0.0)) return 0;  // also maps NaN to 0
  if (value >= static_cast<double>(max_value)) return max_value;
  return static_cast<Sample>(std::nearbyint(value));
}

}  // namespace specband

#endif  // SPECBAND_IMAGE_HPP
