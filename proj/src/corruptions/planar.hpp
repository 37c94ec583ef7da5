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

#ifndef SPECBAND_SRC_CORRUPTIONS_PLANAR_HPP
#define SPECBAND_SRC_CORRUPTIONS_PLANAR_HPP

// Internal floating-point planes and the filtering primitives the
// corruptions are built from. Borders replicate the edge sample.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "specband/image.hpp"
#include "specband/rng.hpp"

namespace specband::detail {

struct FloatPlane {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> data;

  FloatPlane() = default;
  FloatPlane(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), data(w * h, fill) {}

  double& operator()(std::size_t x, std::size_t y) { return data[y * width + x]; }
  double operator()(std::size_t x, std::size_t y) const { return data[y * width + x]; }

  /// Edge-replicating integer access.
  double clamped(std::ptrdiff_t x, std::ptrdiff_t y) const {
    x = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width) - 1);
    y = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1);
    return data[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
  }

  /// Bilinear sample at continuous pixel coordinates (pixel centres at
  /// integers), edge-replicating.
  double bilinear(double x, double y) const;
};

using FloatImage = std::vector<FloatPlane>;

FloatImage to_float(const MultiChannelImage& img);
MultiChannelImage to_image(const FloatImage& planes, const MultiChannelImage& like);

void clip01(FloatPlane& p);

/// Separable Gaussian blur, kernel truncated at 4 sigma. sigma <= 0 is a no-op.
FloatPlane gaussian_blur(const FloatPlane& src, double sigma);

/// Dense 2-D convolution with an odd-sized, centred kernel.
FloatPlane convolve(const FloatPlane& src, const std::vector<double>& kernel, std::size_t ksize);

/// Anti-aliased disk kernel normalized to unit sum.
std::vector<double> disk_kernel(double radius, std::size_t& ksize);

/// One-sided Gaussian-weighted streak along `angle_deg`, sampled bilinearly
/// at taps 0..ceil(radius).
FloatPlane motion_blur(const FloatPlane& src, double radius, double sigma, double angle_deg);

/// Centre zoom by `factor` >= 1, keeping the original size.
FloatPlane center_zoom(const FloatPlane& src, double factor);

/// Diamond-square fractal on a toroidal size x size grid (size a power of
/// two), normalized to [0, 1]. `decay` divides the perturbation amplitude at
/// every octave.
FloatPlane plasma_fractal(std::size_t size, double decay, Xoshiro256pp& rng);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

/// Baseline JPEG round trip (YCbCr, 4:2:0, IJG-scaled tables, float DCT) on
/// 8-bit planes. Requires three planes.
std::vector<Plane> jpeg_roundtrip(const std::vector<Plane>& rgb, std::size_t width,
                                  std::size_t height, int quality);

}  // namespace specband::detail

#endif  // SPECBAND_SRC_CORRUPTIONS_PLANAR_HPP
