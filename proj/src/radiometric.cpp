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

#include "specband/radiometric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "specband/error.hpp"

namespace specband {
namespace {

std::vector<double> resolve_weights(const std::vector<double>& weights, std::size_t bands) {
  if (weights.empty()) return std::vector<double>(bands, 1.0 / static_cast<double>(bands));
  return weights;
}

void check_weights(const std::vector<double>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("Brovey weights must be >= 0");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("Brovey weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

void require_depth(const MultiChannelImage& img, int depth, const char* op) {
  if (img.bit_depth() != depth) {
    throw InvalidArgument(std::string(op) + " expects a " + std::to_string(depth) +
                          "-bit image, got " + std::to_string(img.bit_depth()) + "-bit");
  }
}

// Half-pixel-centred bilinear sample of an integer-ratio upsampling.
struct AxisTap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

std::vector<AxisTap> upsample_taps(std::size_t src, std::size_t ratio) {
  std::vector<AxisTap> taps(src * ratio);
  for (std::size_t d = 0; d < taps.size(); ++d) {
    double pos = (static_cast<double>(d) + 0.5) / static_cast<double>(ratio) - 0.5;
    pos = std::clamp(pos, 0.0, static_cast<double>(src - 1));
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    taps[d] = {lo, std::min(lo + 1, src - 1), pos - static_cast<double>(lo)};
  }
  return taps;
}

MultiChannelImage map_samples(const MultiChannelImage& img, const std::array<Sample, 256>& lut) {
  std::vector<Plane> planes = img.planes();
  for (auto& plane : planes) {
    for (auto& v : plane) v = lut[v];
  }
  return MultiChannelImage(img.width(), img.height(), 8, img.channel_names(), std::move(planes));
}

}  // namespace

void RadiometricConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be > 0");
  if (!(clip_fraction >= 0.0 && clip_fraction < 0.5)) {
    throw InvalidArgument("clip_fraction must lie in [0, 0.5)");
  }
  if (!brovey_weights.empty()) check_weights(brovey_weights);
}

RadiometricConfig RadiometricConfig::from_json(const nlohmann::json& doc) {
  RadiometricConfig cfg;
  try {
    cfg.gamma = doc.value("gamma", cfg.gamma);
    cfg.clip_fraction = doc.value("clip_fraction", cfg.clip_fraction);
    cfg.brovey_weights = doc.value("brovey_weights", cfg.brovey_weights);
    cfg.pansharpen = doc.value("pansharpen", cfg.pansharpen);
    cfg.stretch_before_gamma = doc.value("stretch_before_gamma", cfg.stretch_before_gamma);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("radiometric config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json RadiometricConfig::to_json() const {
  return {{"gamma", gamma},
          {"clip_fraction", clip_fraction},
          {"brovey_weights", brovey_weights},
          {"pansharpen", pansharpen},
          {"stretch_before_gamma", stretch_before_gamma}};
}

MultiChannelImage brovey_pansharpen(const MultiChannelImage& ms, const MultiChannelImage& pan,
                                    const std::vector<double>& weights) {
  require_depth(ms, 16, "brovey_pansharpen");
  require_depth(pan, 16, "brovey_pansharpen");
  if (pan.channel_count() != 1) throw InvalidArgument("pan must have exactly one channel");
  if (ms.empty() || ms.pixel_count() == 0) throw InvalidArgument("empty multispectral image");
  if (pan.width() < ms.width() || pan.height() < ms.height() ||
      pan.width() % ms.width() != 0 || pan.height() % ms.height() != 0) {
    throw InvalidArgument("pan/multispectral dimension ratio is not an integer");
  }
  const auto w = resolve_weights(weights, ms.channel_count());
  if (w.size() != ms.channel_count()) {
    throw InvalidArgument("band count " + std::to_string(ms.channel_count()) +
                          " does not match weight count " + std::to_string(w.size()));
  }
  check_weights(w);

  const std::size_t rx = pan.width() / ms.width();
  const std::size_t ry = pan.height() / ms.height();
  const auto xt = upsample_taps(ms.width(), rx);
  const auto yt = upsample_taps(ms.height(), ry);
  const std::size_t out_w = pan.width();
  const std::size_t out_h = pan.height();
  const std::size_t bands = ms.channel_count();

  std::vector<Plane> out(bands, Plane(out_w * out_h));
  std::vector<double> up(bands);
  const auto pan_plane = pan.plane(0);
  for (std::size_t y = 0; y < out_h; ++y) {
    const auto& ty = yt[y];
    for (std::size_t x = 0; x < out_w; ++x) {
      const auto& tx = xt[x];
      double den = 0.0;
      for (std::size_t b = 0; b < bands; ++b) {
        const auto& p = ms.planes()[b];
        const std::size_t sw = ms.width();
        const double top = p[ty.lo * sw + tx.lo] * (1.0 - tx.frac) + p[ty.lo * sw + tx.hi] * tx.frac;
        const double bot = p[ty.hi * sw + tx.lo] * (1.0 - tx.frac) + p[ty.hi * sw + tx.hi] * tx.frac;
        up[b] = top * (1.0 - ty.frac) + bot * ty.frac;
        den += w[b] * up[b];
      }
      const std::size_t i = y * out_w + x;
      const double pv = pan_plane[i];
      for (std::size_t b = 0; b < bands; ++b) {
        out[b][i] = den > 0.0 ? quantize(up[b] * pv / den, 65535) : 0;
      }
    }
  }
  return MultiChannelImage(out_w, out_h, 16, ms.channel_names(), std::move(out));
}

MultiChannelImage rescale_16_to_8(const MultiChannelImage& img) {
  require_depth(img, 16, "rescale_16_to_8");
  std::vector<Plane> planes = img.planes();
  for (auto& plane : planes) {
    for (auto& v : plane) v = quantize(static_cast<double>(v) * 255.0 / 65535.0, 255);
  }
  return MultiChannelImage(img.width(), img.height(), 8, img.channel_names(), std::move(planes));
}

MultiChannelImage gamma_correct(const MultiChannelImage& img, double gamma) {
  require_depth(img, 8, "gamma_correct");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be > 0");
  std::array<Sample, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    lut[v] = quantize(255.0 * std::pow(v / 255.0, 1.0 / gamma), 255);
  }
  return map_samples(img, lut);
}

StretchResult percentile_clip_stretch(const MultiChannelImage& img, double clip_fraction) {
  require_depth(img, 8, "percentile_clip_stretch");
  if (!(clip_fraction >= 0.0 && clip_fraction < 0.5)) {
    throw InvalidArgument("clip_fraction must lie in [0, 0.5)");
  }
  StretchResult result;
  std::vector<Plane> planes = img.planes();
  const double n = static_cast<double>(img.pixel_count());
  for (std::size_t c = 0; c < planes.size(); ++c) {
    auto& plane = planes[c];
    std::array<std::uint64_t, 256> hist{};
    for (Sample v : plane) ++hist[v];

    int lo = 0;
    int vmin = -1;
    int hi = 0;
    std::uint64_t cum = 0;
    bool lo_found = false;
    for (int v = 0; v < 256; ++v) {
      cum += hist[v];
      if (hist[v] > 0) {
        if (vmin < 0) vmin = v;
        hi = v;
      }
      if (!lo_found && static_cast<double>(cum) >= clip_fraction * n) {
        lo = v;
        lo_found = true;
      }
    }
    // With clip_fraction 0 the CDF criterion is met at 0; the clip point is
    // never below the smallest occupied value.
    lo = std::max(lo, vmin);
    if (plane.empty() || lo >= hi) {
      std::fill(plane.begin(), plane.end(), Sample{0});
      result.degenerate_channels.push_back(img.channel_names()[c]);
      continue;
    }
    std::array<Sample, 256> lut{};
    const double span = static_cast<double>(hi - lo);
    for (int v = 0; v < 256; ++v) {
      const int clipped = std::clamp(v, lo, hi);
      lut[v] = quantize(static_cast<double>(clipped - lo) * 255.0 / span, 255);
    }
    for (auto& v : plane) v = lut[v];
  }
  result.image =
      MultiChannelImage(img.width(), img.height(), 8, img.channel_names(), std::move(planes));
  return result;
}

PreprocessResult preprocess_scene(const MultiChannelImage& ms,
                                  const std::optional<MultiChannelImage>& pan,
                                  const RadiometricConfig& cfg,
                                  const std::vector<ChannelGroup>& out_groups) {
  cfg.validate();
  if (cfg.pansharpen != pan.has_value()) {
    throw InvalidArgument(cfg.pansharpen ? "pansharpening enabled but no pan band given"
                                         : "pan band given but pansharpening disabled");
  }
  MultiChannelImage current = cfg.pansharpen ? brovey_pansharpen(ms, *pan, cfg.brovey_weights) : ms;
  current = rescale_16_to_8(current);

  PreprocessResult result;
  if (cfg.stretch_before_gamma) {
    auto stretched = percentile_clip_stretch(current, cfg.clip_fraction);
    result.degenerate_channels = std::move(stretched.degenerate_channels);
    current = gamma_correct(stretched.image, cfg.gamma);
  } else {
    current = gamma_correct(current, cfg.gamma);
    auto stretched = percentile_clip_stretch(current, cfg.clip_fraction);
    result.degenerate_channels = std::move(stretched.degenerate_channels);
    current = std::move(stretched.image);
  }
  for (const auto& group : out_groups) result.groups.push_back(extract_group(current, group));
  result.image = std::move(current);
  return result;
}

}  // namespace specband
