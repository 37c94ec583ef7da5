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

#include "specband/image.hpp"

#include <algorithm>
#include <set>

#include "specband/error.hpp"

namespace specband {

MultiChannelImage::MultiChannelImage(std::size_t width, std::size_t height,
                                     int bit_depth,
                                     std::vector<std::string> channel_names,
                                     std::vector<Plane> planes)
    : width_(width),
      height_(height),
      bit_depth_(bit_depth),
      names_(std::move(channel_names)),
      planes_(std::move(planes)) {
  if (bit_depth_ != 8 && bit_depth_ != 16) {
    throw InvalidArgument("unsupported bit depth " + std::to_string(bit_depth_));
  }
  if (names_.size() != planes_.size()) {
    throw InvalidArgument("channel name count does not match plane count");
  }
  std::set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw InvalidArgument("empty channel name");
    if (!seen.insert(name).second) {
      throw InvalidArgument("duplicate channel name '" + name + "'");
    }
  }
  const Sample limit = max_value();
  for (std::size_t c = 0; c < planes_.size(); ++c) {
    if (planes_[c].size() != width_ * height_) {
      throw InvalidArgument("plane '" + names_[c] + "' has " +
                            std::to_string(planes_[c].size()) + " samples, expected " +
                            std::to_string(width_ * height_));
    }
    if (bit_depth_ == 8 &&
        std::any_of(planes_[c].begin(), planes_[c].end(),
                    [limit](Sample v) { return v > limit; })) {
      throw InvalidArgument("plane '" + names_[c] + "' exceeds 8-bit range");
    }
  }
}

MultiChannelImage MultiChannelImage::filled(std::size_t width, std::size_t height,
                                            int bit_depth,
                                            std::vector<std::string> channel_names,
                                            Sample value) {
  std::vector<Plane> planes(channel_names.size(), Plane(width * height, value));
  return MultiChannelImage(width, height, bit_depth, std::move(channel_names),
                           std::move(planes));
}

std::span<const Sample> MultiChannelImage::plane(std::size_t index) const {
  if (index >= planes_.size()) {
    throw InvalidArgument("channel index " + std::to_string(index) + " out of range");
  }
  return planes_[index];
}

std::span<const Sample> MultiChannelImage::plane(const std::string& name) const {
  return planes_[channel_index(name)];
}

std::size_t MultiChannelImage::channel_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidArgument("unknown channel '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

bool MultiChannelImage::has_channel(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

ChannelGroup rgb_group() { return {"rgb", {"R", "G", "B"}}; }
ChannelGroup nir_group() { return {"nir", {"NIR"}}; }

ChannelGroup parse_channel_group(const std::string& text) {
  ChannelGroup group;
  std::string members = text;
  if (auto eq = text.find('='); eq != std::string::npos) {
    group.name = text.substr(0, eq);
    members = text.substr(eq + 1);
  }
  std::size_t start = 0;
  while (start <= members.size()) {
    auto comma = members.find(',', start);
    if (comma == std::string::npos) comma = members.size();
    if (comma > start) group.members.push_back(members.substr(start, comma - start));
    start = comma + 1;
  }
  if (group.members.empty()) throw InvalidArgument("empty channel group '" + text + "'");
  if (group.name.empty()) group.name = members;
  return group;
}

MultiChannelImage extract_group(const MultiChannelImage& img, const ChannelGroup& group) {
  if (group.members.empty()) throw InvalidArgument("channel group has no members");
  std::vector<Plane> planes;
  planes.reserve(group.members.size());
  for (const auto& name : group.members) {
    auto src = img.plane(name);
    planes.emplace_back(src.begin(), src.end());
  }
  return MultiChannelImage(img.width(), img.height(), img.bit_depth(), group.members,
                           std::move(planes));
}

MultiChannelImage replicate_channel(const MultiChannelImage& img, std::size_t copies) {
  if (img.channel_count() != 1) {
    throw InvalidArgument("replicate_channel needs a 1-channel image, got " +
                          std::to_string(img.channel_count()));
  }
  if (copies == 0) throw InvalidArgument("copies must be >= 1");
  const auto& base = img.channel_names().front();
  std::vector<std::string> names;
  std::vector<Plane> planes;
  for (std::size_t i = 0; i < copies; ++i) {
    names.push_back(i == 0 ? base : base + "#" + std::to_string(i));
    planes.push_back(img.planes().front());
  }
  return MultiChannelImage(img.width(), img.height(), img.bit_depth(), std::move(names),
                           std::move(planes));
}

MultiChannelImage take_channel(const MultiChannelImage& img, std::size_t index) {
  auto src = img.plane(index);
  std::string name = img.channel_names()[index];
  // Collapsing a replicated stack restores the base name.
  if (auto hash = name.find('#'); hash != std::string::npos) name.resize(hash);
  return MultiChannelImage(img.width(), img.height(), img.bit_depth(), {name},
                           {Plane(src.begin(), src.end())});
}

MultiChannelImage stack_channels(const std::vector<MultiChannelImage>& parts) {
  if (parts.empty()) throw InvalidArgument("nothing to stack");
  std::vector<std::string> names;
  std::vector<Plane> planes;
  for (const auto& part : parts) {
    if (part.width() != parts[0].width() || part.height() != parts[0].height() ||
        part.bit_depth() != parts[0].bit_depth()) {
      throw InvalidArgument("stack_channels: shape or bit depth mismatch");
    }
    names.insert(names.end(), part.channel_names().begin(), part.channel_names().end());
    planes.insert(planes.end(), part.planes().begin(), part.planes().end());
  }
  return MultiChannelImage(parts[0].width(), parts[0].height(), parts[0].bit_depth(),
                           std::move(names), std::move(planes));
}

MultiChannelImage rename_channels(const MultiChannelImage& img,
                                  std::vector<std::string> names) {
  return MultiChannelImage(img.width(), img.height(), img.bit_depth(), std::move(names),
                           img.planes());
}

MultiChannelImage crop(const MultiChannelImage& img, const Rect& rect) {
  if (rect.width == 0 || rect.height == 0 || rect.x + rect.width > img.width() ||
      rect.y + rect.height > img.height()) {
    throw InvalidArgument("crop rectangle outside image");
  }
  std::vector<Plane> planes;
  planes.reserve(img.channel_count());
  for (const auto& src : img.planes()) {
    Plane dst(rect.width * rect.height);
    for (std::size_t row = 0; row < rect.height; ++row) {
      auto first = src.begin() + static_cast<std::ptrdiff_t>((rect.y + row) * img.width() + rect.x);
      std::copy(first, first + static_cast<std::ptrdiff_t>(rect.width),
                dst.begin() + static_cast<std::ptrdiff_t>(row * rect.width));
    }
    planes.push_back(std::move(dst));
  }
  return MultiChannelImage(rect.width, rect.height, img.bit_depth(), img.channel_names(),
                           std::move(planes));
}

void paste(std::vector<Plane>& canvas, std::size_t canvas_width,
           const MultiChannelImage& patch, std::size_t x, std::size_t y) {
  if (canvas.size() != patch.channel_count()) {
    throw InvalidArgument("paste: channel count mismatch");
  }
  for (std::size_t c = 0; c < canvas.size(); ++c) {
    const std::size_t canvas_height = canvas_width ? canvas[c].size() / canvas_width : 0;
    if (x + patch.width() > canvas_width || y + patch.height() > canvas_height) {
      throw InvalidArgument("paste: patch exceeds canvas");
    }
    const auto& src = patch.planes()[c];
    for (std::size_t row = 0; row < patch.height(); ++row) {
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(row * patch.width()),
                  patch.width(),
                  canvas[c].begin() + static_cast<std::ptrdiff_t>((y + row) * canvas_width + x));
    }
  }
}

}  // namespace specband
