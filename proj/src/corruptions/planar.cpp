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

#include "planar.hpp"

#include <cmath>
#include <numbers>

#include "specband/error.hpp"

namespace specband::detail {

double FloatPlane::bilinear(double x, double y) const {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double ax = x - fx;
  const double ay = y - fy;
  const auto ix = static_cast<std::ptrdiff_t>(fx);
  const auto iy = static_cast<std::ptrdiff_t>(fy);
  const double top = clamped(ix, iy) * (1.0 - ax) + clamped(ix + 1, iy) * ax;
  const double bot = clamped(ix, iy + 1) * (1.0 - ax) + clamped(ix + 1, iy + 1) * ax;
  return top * (1.0 - ay) + bot * ay;
}

FloatImage to_float(const MultiChannelImage& img) {
  const double scale = 1.0 / img.max_value();
  FloatImage out;
  out.reserve(img.channel_count());
  for (const auto& plane : img.planes()) {
    FloatPlane p(img.width(), img.height());
    for (std::size_t i = 0; i < plane.size(); ++i) p.data[i] = plane[i] * scale;
    out.push_back(std::move(p));
  }
  return out;
}

MultiChannelImage to_image(const FloatImage& planes, const MultiChannelImage& like) {
  const double scale = like.max_value();
  std::vector<Plane> out;
  out.reserve(planes.size());
  for (const auto& p : planes) {
    Plane q(p.data.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantize(p.data[i] * scale, like.max_value());
    out.push_back(std::move(q));
  }
  return MultiChannelImage(like.width(), like.height(), like.bit_depth(), like.channel_names(),
                           std::move(out));
}

void clip01(FloatPlane& p) {
  for (auto& v : p.data) v = std::clamp(v, 0.0, 1.0);
}

FloatPlane gaussian_blur(const FloatPlane& src, double sigma) {
  if (!(sigma > 0.0)) return src;
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;

  FloatPlane tmp(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] *
               src.clamped(static_cast<std::ptrdiff_t>(x) + i, static_cast<std::ptrdiff_t>(y));
      }
      tmp(x, y) = acc;
    }
  }
  FloatPlane out(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        acc += k[static_cast<std::size_t>(i + radius)] *
               tmp.clamped(static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(y) + i);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

FloatPlane convolve(const FloatPlane& src, const std::vector<double>& kernel, std::size_t ksize) {
  const auto half = static_cast<std::ptrdiff_t>(ksize / 2);
  FloatPlane out(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t ky = -half; ky <= half; ++ky) {
        for (std::ptrdiff_t kx = -half; kx <= half; ++kx) {
          const double w = kernel[static_cast<std::size_t>((ky + half)) * ksize +
                                  static_cast<std::size_t>(kx + half)];
          if (w == 0.0) continue;
          acc += w * src.clamped(static_cast<std::ptrdiff_t>(x) + kx,
                                 static_cast<std::ptrdiff_t>(y) + ky);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

std::vector<double> disk_kernel(double radius, std::size_t& ksize) {
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(radius + 0.5));
  ksize = static_cast<std::size_t>(2 * half + 1);
  std::vector<double> k(ksize * ksize, 0.0);
  double sum = 0.0;
  for (std::ptrdiff_t y = -half; y <= half; ++y) {
    for (std::ptrdiff_t x = -half; x <= half; ++x) {
      const double d = std::hypot(static_cast<double>(x), static_cast<double>(y));
      const double w = std::clamp(radius + 0.5 - d, 0.0, 1.0);
      k[static_cast<std::size_t>(y + half) * ksize + static_cast<std::size_t>(x + half)] = w;
      sum += w;
    }
  }
  for (auto& v : k) v /= sum;
  return k;
}

FloatPlane motion_blur(const FloatPlane& src, double radius, double sigma, double angle_deg) {
  const auto taps = static_cast<std::size_t>(std::max(1.0, std::ceil(radius)));
  const double s = std::max(sigma, 1e-6);
  std::vector<double> w(taps + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i <= taps; ++i) {
    w[i] = std::exp(-0.5 * static_cast<double>(i * i) / (s * s));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(rad);
  const double dy = std::sin(rad);
  FloatPlane out(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= taps; ++i) {
        const double t = static_cast<double>(i);
        acc += w[i] * src.bilinear(static_cast<double>(x) - t * dx, static_cast<double>(y) - t * dy);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

FloatPlane center_zoom(const FloatPlane& src, double factor) {
  const double cx = 0.5 * static_cast<double>(src.width);
  const double cy = 0.5 * static_cast<double>(src.height);
  FloatPlane out(src.width, src.height);
  for (std::size_t y = 0; y < src.height; ++y) {
    const double sy = cy + (static_cast<double>(y) + 0.5 - cy) / factor - 0.5;
    for (std::size_t x = 0; x < src.width; ++x) {
      const double sx = cx + (static_cast<double>(x) + 0.5 - cx) / factor - 0.5;
      out(x, y) = src.bilinear(sx, sy);
    }
  }
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FloatPlane plasma_fractal(std::size_t size, double decay, Xoshiro256pp& rng) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw InvalidArgument("plasma_fractal size must be a power of two >= 2");
  }
  FloatPlane map(size, size, 0.0);
  double wibble = 100.0;
  auto at = [&](std::size_t x, std::size_t y) -> double& { return map(x % size, y % size); };
  auto perturbed_mean = [&](double sum4) { return sum4 / 4.0 + wibble * rng.uniform(-wibble, wibble); };

  for (std::size_t step = size; step >= 2; step /= 2) {
    const std::size_t half = step / 2;
    // Squares: centres from the four corners.
    for (std::size_t y = 0; y < size; y += step) {
      for (std::size_t x = 0; x < size; x += step) {
        const double sum = at(x, y) + at(x + step, y) + at(x, y + step) + at(x + step, y + step);
        at(x + half, y + half) = perturbed_mean(sum);
      }
    }
    // Diamonds: edge midpoints from their four neighbours (toroidal).
    for (std::size_t y = 0; y < size; y += step) {
      for (std::size_t x = 0; x < size; x += step) {
        const double top = at(x, y) + at(x + step, y) + at(x + half, y + half) +
                           at(x + half, y + size - half);
        at(x + half, y) = perturbed_mean(top);
        const double left = at(x, y) + at(x, y + step) + at(x + half, y + half) +
                            at(x + size - half, y + half);
        at(x, y + half) = perturbed_mean(left);
      }
    }
    wibble /= decay;
  }
  const auto [lo, hi] = std::minmax_element(map.data.begin(), map.data.end());
  const double mn = *lo;
  const double range = *hi - mn;
  for (auto& v : map.data) v = range > 0.0 ? (v - mn) / range : 0.0;
  return map;
}

}  // namespace specband::detail
