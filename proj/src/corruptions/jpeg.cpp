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

// Lossy part of a baseline JPEG codec: colour transform, chroma
// subsampling, 8x8 DCT, quantization and the inverse path. Entropy coding is
// lossless and therefore omitted.

#include <array>
#include <cmath>
#include <numbers>

#include "planar.hpp"
#include "specband/error.hpp"

namespace specband::detail {
namespace {

// ITU T.81 Annex K tables, natural (row-major) order.
constexpr std::array<int, 64> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

std::array<double, 64> scaled_table(const std::array<int, 64>& base, int quality) {
  quality = std::clamp(quality, 1, 100);
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> out{};
  for (std::size_t i = 0; i < 64; ++i) {
    out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  }
  return out;
}

struct DctBasis {
  std::array<double, 64> c{};  // c[u*8+x] = alpha(u) cos((2x+1)u pi / 16)
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) {
        c[u * 8 + x] = alpha * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / 16.0);
      }
    }
  }
};

const DctBasis& basis() {
  static const DctBasis b;
  return b;
}

// Quantizes a level-shifted channel of size w x h in place (block by block
// over the edge-replicated extent).
void quantize_channel(std::vector<double>& chan, std::size_t w, std::size_t h,
                      const std::array<double, 64>& q) {
  const auto& c = basis().c;
  const std::size_t bw = (w + 7) / 8;
  const std::size_t bh = (h + 7) / 8;
  std::array<double, 64> block{};
  std::array<double, 64> tmp{};
  std::array<double, 64> coef{};
  for (std::size_t by = 0; by < bh; ++by) {
    for (std::size_t bx = 0; bx < bw; ++bx) {
      for (std::size_t y = 0; y < 8; ++y) {
        const std::size_t sy = std::min(by * 8 + y, h - 1);
        for (std::size_t x = 0; x < 8; ++x) {
          const std::size_t sx = std::min(bx * 8 + x, w - 1);
          block[y * 8 + x] = chan[sy * w + sx] - 128.0;
        }
      }
      // Forward 2-D DCT: rows then columns.
      for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t u = 0; u < 8; ++u) {
          double acc = 0.0;
          for (std::size_t x = 0; x < 8; ++x) acc += c[u * 8 + x] * block[y * 8 + x];
          tmp[y * 8 + u] = acc;
        }
      }
      for (std::size_t v = 0; v < 8; ++v) {
        for (std::size_t u = 0; u < 8; ++u) {
          double acc = 0.0;
          for (std::size_t y = 0; y < 8; ++y) acc += c[v * 8 + y] * tmp[y * 8 + u];
          coef[v * 8 + u] = std::nearbyint(acc / q[v * 8 + u]) * q[v * 8 + u];
        }
      }
      // Inverse.
      for (std::size_t v = 0; v < 8; ++v) {
        for (std::size_t x = 0; x < 8; ++x) {
          double acc = 0.0;
          for (std::size_t u = 0; u < 8; ++u) acc += c[u * 8 + x] * coef[v * 8 + u];
          tmp[v * 8 + x] = acc;
        }
      }
      for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 0; x < 8; ++x) {
          double acc = 0.0;
          for (std::size_t v = 0; v < 8; ++v) acc += c[v * 8 + y] * tmp[v * 8 + x];
          block[y * 8 + x] = acc + 128.0;
        }
      }
      for (std::size_t y = 0; y < 8; ++y) {
        const std::size_t sy = by * 8 + y;
        if (sy >= h) break;
        for (std::size_t x = 0; x < 8; ++x) {
          const std::size_t sx = bx * 8 + x;
          if (sx >= w) break;
          chan[sy * w + sx] = std::clamp(std::nearbyint(block[y * 8 + x]), 0.0, 255.0);
        }
      }
    }
  }
}

}  // namespace

std::vector<Plane> jpeg_roundtrip(const std::vector<Plane>& rgb, std::size_t width,
                                  std::size_t height, int quality) {
  if (rgb.size() != 3) throw InvalidArgument("jpeg_roundtrip needs three planes");
  const std::size_t n = width * height;
  std::vector<double> y(n), cb(n), cr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb[0][i], g = rgb[1][i], b = rgb[2][i];
    y[i] = std::clamp(std::nearbyint(0.299 * r + 0.587 * g + 0.114 * b), 0.0, 255.0);
    cb[i] = std::clamp(std::nearbyint(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b), 0.0, 255.0);
    cr[i] = std::clamp(std::nearbyint(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b), 0.0, 255.0);
  }
  // 4:2:0 by 2x2 box averaging.
  const std::size_t cw = (width + 1) / 2;
  const std::size_t ch = (height + 1) / 2;
  auto subsample = [&](const std::vector<double>& full) {
    std::vector<double> out(cw * ch);
    for (std::size_t sy = 0; sy < ch; ++sy) {
      for (std::size_t sx = 0; sx < cw; ++sx) {
        double acc = 0.0;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t yy = std::min(2 * sy + dy, height - 1);
            const std::size_t xx = std::min(2 * sx + dx, width - 1);
            acc += full[yy * width + xx];
          }
        }
        out[sy * cw + sx] = std::nearbyint(acc / 4.0);
      }
    }
    return out;
  };
  auto cb_s = subsample(cb);
  auto cr_s = subsample(cr);

  quantize_channel(y, width, height, scaled_table(kLumaBase, quality));
  const auto chroma_q = scaled_table(kChromaBase, quality);
  quantize_channel(cb_s, cw, ch, chroma_q);
  quantize_channel(cr_s, cw, ch, chroma_q);

  std::vector<Plane> out(3, Plane(n));
  for (std::size_t yy = 0; yy < height; ++yy) {
    for (std::size_t xx = 0; xx < width; ++xx) {
      const std::size_t i = yy * width + xx;
      const std::size_t ci = (yy / 2) * cw + xx / 2;
      const double lum = y[i];
      const double dcb = cb_s[ci] - 128.0;
      const double dcr = cr_s[ci] - 128.0;
      out[0][i] = quantize(lum + 1.402 * dcr, 255);
      out[1][i] = quantize(lum - 0.344136 * dcb - 0.714136 * dcr, 255);
      out[2][i] = quantize(lum + 1.772 * dcb, 255);
    }
  }
  return out;
}

}  // namespace specband::detail
