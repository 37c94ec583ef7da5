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

#ifndef SPECBAND_PNG_IO_HPP
#define SPECBAND_PNG_IO_HPP

#include <filesystem>

#include "specband/image.hpp"

namespace specband {

/// Name of the sidecar manifest inside a multi-band directory.
inline constexpr const char* kSidecarName = "channels.json";

/// Loads an 8/16-bit PNG (gray, gray+alpha, RGB, RGBA) or a sidecar
/// directory of single-channel PNGs. Channel names stored by save_raster are
/// restored; foreign PNGs get L / L,A / R,G,B / R,G,B,A.
MultiChannelImage load_raster(const std::filesystem::path& path);

/// A path ending in ".png" becomes one PNG file (1, 2, 3 or 4 channels);
/// any other path becomes a sidecar directory with one PNG per channel.
void save_raster(const MultiChannelImage& img, const std::filesystem::path& path);

}  // namespace specband

#endif  // SPECBAND_PNG_IO_HPP
