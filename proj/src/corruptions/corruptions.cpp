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

#include "specband/corruptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "planar.hpp"
#include "specband/error.hpp"
#include "specband/rng.hpp"

namespace specband {

using detail::FloatImage;
using detail::FloatPlane;

namespace {

constexpr std::array<CatalogEntry, kCorruptionKindCount> kCatalog = {{
    {CorruptionKind::gaussian_noise, CorruptionFamily::noise, RandomnessPolicy::independent},
    {CorruptionKind::shot_noise, CorruptionFamily::noise, RandomnessPolicy::independent},
    {CorruptionKind::impulse_noise, CorruptionFamily::noise, RandomnessPolicy::independent},
    {CorruptionKind::defocus_blur, CorruptionFamily::blur, RandomnessPolicy::shared},
    {CorruptionKind::glass_blur, CorruptionFamily::blur, RandomnessPolicy::shared},
    {CorruptionKind::motion_blur, CorruptionFamily::blur, RandomnessPolicy::shared},
    {CorruptionKind::zoom_blur, CorruptionFamily::blur, RandomnessPolicy::shared},
    {CorruptionKind::snow, CorruptionFamily::weather, RandomnessPolicy::shared},
    {CorruptionKind::frost, CorruptionFamily::weather, RandomnessPolicy::shared},
    {CorruptionKind::fog, CorruptionFamily::weather, RandomnessPolicy::shared},
    {CorruptionKind::brightness, CorruptionFamily::weather, RandomnessPolicy::shared},
    {CorruptionKind::contrast, CorruptionFamily::digital, RandomnessPolicy::shared},
    {CorruptionKind::elastic_transform, CorruptionFamily::digital, RandomnessPolicy::shared},
    {CorruptionKind::pixelate, CorruptionFamily::digital, RandomnessPolicy::shared},
    {CorruptionKind::jpeg_compression, CorruptionFamily::digital, RandomnessPolicy::shared},
}};

constexpr const char* kKindNames[kCorruptionKindCount] = {
    "gaussian_noise", "shot_noise", "impulse_noise", "defocus_blur",      "glass_blur",
    "motion_blur",    "zoom_blur",  "snow",          "frost",             "fog",
    "brightness",     "contrast",   "elastic_transform", "pixelate", "jpeg_compression"};

constexpr std::size_t kParamCounts[kCorruptionKindCount] = {
    1,  // gaussian_noise: sigma on [0,1]
    1,  // shot_noise: photon scale
    1,  // impulse_noise: flipped fraction
    2,  // defocus_blur: disk radius, alias sigma
    3,  // glass_blur: sigma, max displacement, iterations
    2,  // motion_blur: radius, sigma
    2,  // zoom_blur: max zoom (exclusive), zoom step
    7,  // snow: loc, scale, zoom, threshold, blur radius, blur sigma, blend
    2,  // frost: image weight, frost weight
    2,  // fog: strength, fractal decay
    1,  // brightness: value offset
    1,  // contrast: contrast factor
    2,  // elastic_transform: displacement rms, smoothing sigma
    1,  // pixelate: downscale factor
    1,  // jpeg_compression: quality
};

// Lengths are in pixels at the 224-pixel reference size and get scaled by
// min(width, height) / 224, floored at kMinScale so that blur kernels keep
// a visible footprint on the smallest accepted images.
constexpr double kMinScale = 0.25;

SeverityTable make_defaults() {
  using K = CorruptionKind;
  SeverityTable t;
  auto fill = [&t](K kind, std::initializer_list<std::vector<double>> rows) {
    int s = 1;
    for (const auto& row : rows) t.set(kind, s++, row);
  };
  fill(K::gaussian_noise, {{0.08}, {0.12}, {0.18}, {0.26}, {0.38}});
  fill(K::shot_noise, {{60}, {25}, {12}, {5}, {3}});
  fill(K::impulse_noise, {{0.03}, {0.06}, {0.09}, {0.17}, {0.27}});
  fill(K::defocus_blur, {{3, 0.1}, {4, 0.5}, {6, 0.5}, {8, 0.5}, {10, 0.5}});
  fill(K::glass_blur, {{0.7, 1, 1}, {0.9, 1, 2}, {1.0, 2, 2}, {1.1, 2, 3}, {1.5, 3, 3}});
  fill(K::motion_blur, {{10, 3}, {15, 5}, {15, 8}, {15, 12}, {20, 15}});
  fill(K::zoom_blur, {{1.11, 0.01}, {1.16, 0.01}, {1.21, 0.02}, {1.26, 0.02}, {1.31, 0.03}});
  fill(K::snow, {{0.1, 0.3, 3, 0.5, 10, 4, 0.8},
                 {0.2, 0.3, 2, 0.5, 12, 4, 0.7},
                 {0.55, 0.3, 4, 0.9, 12, 8, 0.62},
                 {0.55, 0.3, 4.5, 0.85, 12, 8, 0.56},
                 {0.55, 0.3, 2.5, 0.85, 12, 12, 0.5}});
  fill(K::frost, {{0.75, 0.25}, {0.65, 0.35}, {0.55, 0.45}, {0.45, 0.55}, {0.35, 0.65}});
  fill(K::fog, {{1.5, 2.0}, {2.0, 2.0}, {2.5, 1.7}, {2.5, 1.5}, {3.0, 1.4}});
  fill(K::brightness, {{0.1}, {0.2}, {0.3}, {0.4}, {0.5}});
  fill(K::contrast, {{0.4}, {0.3}, {0.2}, {0.1}, {0.05}});
  fill(K::elastic_transform, {{1.0, 3.0}, {2.0, 3.0}, {3.0, 3.0}, {4.5, 3.0}, {6.0, 3.0}});
  fill(K::pixelate, {{0.6}, {0.5}, {0.4}, {0.3}, {0.25}});
  fill(K::jpeg_compression, {{25}, {18}, {15}, {10}, {7}});
  return t;
}

std::size_t index_of(CorruptionKind kind) { return static_cast<std::size_t>(kind); }

void check_severity(int severity) {
  if (severity < 1 || severity > kMaxSeverity) {
    throw InvalidArgument("severity must be in 1..5, got " + std::to_string(severity));
  }
}

// --- individual corruptions -------------------------------------------------

struct Context {
  FloatImage& img;
  std::span<const double> p;
  double scale;  // max(min(w, h) / 224, kMinScale)
  Xoshiro256pp& rng;
};

void gaussian_noise(Context& c) {
  const double sigma = c.p[0];
  for (auto& plane : c.img) {
    for (auto& v : plane.data) v = std::clamp(v + sigma * c.rng.normal(), 0.0, 1.0);
  }
}

void shot_noise(Context& c) {
  const double photons = c.p[0];
  for (auto& plane : c.img) {
    for (auto& v : plane.data) {
      v = std::clamp(static_cast<double>(c.rng.poisson(v * photons)) / photons, 0.0, 1.0);
    }
  }
}

void impulse_noise(Context& c) {
  const double amount = c.p[0];
  for (auto& plane : c.img) {
    for (auto& v : plane.data) {
      if (c.rng.uniform01() < amount) v = c.rng.uniform01() < 0.5 ? 1.0 : 0.0;
    }
  }
}

void defocus_blur(Context& c) {
  std::size_t ksize = 0;
  const auto kernel = detail::disk_kernel(c.p[0] * c.scale, ksize);
  for (auto& plane : c.img) {
    plane = detail::gaussian_blur(detail::convolve(plane, kernel, ksize), c.p[1] * c.scale);
    detail::clip01(plane);
  }
}

constexpr double kGlassFinalSigma = 0.7;

void glass_blur(Context& c) {
  const double sigma = c.p[0] * c.scale;
  // The shuffle radius never drops below its reference-size value: rounded
  // down to one pixel, neighbouring severities would become identical.
  const auto delta = static_cast<std::ptrdiff_t>(
      std::max({1.0, std::round(c.p[1]), std::round(c.p[1] * c.scale)}));
  const auto iterations = static_cast<int>(std::lround(c.p[2]));
  for (auto& plane : c.img) plane = detail::gaussian_blur(plane, sigma);

  const auto w = static_cast<std::ptrdiff_t>(c.img[0].width);
  const auto h = static_cast<std::ptrdiff_t>(c.img[0].height);
  // Local pixel shuffling; whole pixels move so channels stay aligned.
  for (int it = 0; it < iterations; ++it) {
    for (std::ptrdiff_t y = h - 1 - delta; y >= delta; --y) {
      for (std::ptrdiff_t x = w - 1 - delta; x >= delta; --x) {
        const auto dx = c.rng.between(-delta, delta);
        const auto dy = c.rng.between(-delta, delta);
        const auto a = static_cast<std::size_t>(y * w + x);
        const auto b = static_cast<std::size_t>((y + dy) * w + (x + dx));
        for (auto& plane : c.img) std::swap(plane.data[a], plane.data[b]);
      }
    }
  }
  // The closing blur has a fixed width: tied to the severity it would
  // smooth away more of the shuffle at higher levels.
  for (auto& plane : c.img) {
    plane = detail::gaussian_blur(plane, kGlassFinalSigma * c.scale);
    detail::clip01(plane);
  }
}

void motion_blur(Context& c) {
  const double angle = c.rng.uniform(-45.0, 45.0);
  for (auto& plane : c.img) {
    plane = detail::motion_blur(plane, c.p[0] * c.scale, c.p[1] * c.scale, angle);
    detail::clip01(plane);
  }
}

void zoom_blur(Context& c) {
  const double max_zoom = c.p[0];
  const double step = c.p[1];
  std::vector<double> zooms;
  for (int i = 0;; ++i) {
    const double z = 1.0 + i * step;
    if (z >= max_zoom - 1e-9) break;
    zooms.push_back(z);
  }
  for (auto& plane : c.img) {
    FloatPlane acc = plane;
    for (double z : zooms) {
      const auto zoomed = detail::center_zoom(plane, z);
      for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += zoomed.data[i];
    }
    const double n = static_cast<double>(zooms.size() + 1);
    for (auto& v : acc.data) v /= n;
    detail::clip01(acc);
    plane = std::move(acc);
  }
}

void snow(Context& c) {
  const std::size_t w = c.img[0].width;
  const std::size_t h = c.img[0].height;
  FloatPlane layer(w, h);
  for (auto& v : layer.data) v = c.rng.normal(c.p[0], c.p[1]);
  layer = detail::center_zoom(layer, c.p[2]);
  for (auto& v : layer.data) v = v < c.p[3] ? 0.0 : std::min(v, 1.0);
  const double angle = c.rng.uniform(-135.0, -45.0);
  layer = detail::motion_blur(layer, c.p[4] * c.scale, c.p[5] * c.scale, angle);

  const double blend = c.p[6];
  const std::size_t n = w * h;
  std::vector<double> gray(n);
  for (std::size_t i = 0; i < n; ++i) {
    gray[i] = 0.299 * c.img[0].data[i] + 0.587 * c.img[1].data[i] + 0.114 * c.img[2].data[i];
  }
  for (auto& plane : c.img) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = plane.data[i];
      const double whitened = blend * v + (1.0 - blend) * std::max(v, gray[i] * 1.5 + 0.5);
      // Flakes plus the same layer rotated by 180 degrees.
      plane.data[i] = std::clamp(whitened + layer.data[i] + layer.data[n - 1 - i], 0.0, 1.0);
    }
  }
}

void frost(Context& c) {
  const std::size_t w = c.img[0].width;
  const std::size_t h = c.img[0].height;
  const std::size_t size = std::max<std::size_t>(detail::next_pow2(std::max(w, h)), 2);
  const FloatPlane texture = detail::plasma_fractal(size, 1.3, c.rng);
  // Ridged fractal: bright crystalline ridges where the field crosses 0.5.
  constexpr double kTint[3] = {0.88, 0.94, 1.0};
  for (std::size_t ch = 0; ch < c.img.size(); ++ch) {
    auto& plane = c.img[ch];
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double ridge = 1.0 - std::fabs(2.0 * texture(x, y) - 1.0);
        const double f = kTint[ch % 3] * (0.3 + 0.7 * ridge * ridge);
        plane(x, y) = std::clamp(c.p[0] * plane(x, y) + c.p[1] * f, 0.0, 1.0);
      }
    }
  }
}

void fog(Context& c) {
  const std::size_t w = c.img[0].width;
  const std::size_t h = c.img[0].height;
  double vmax = 0.0;
  for (const auto& plane : c.img) {
    for (double v : plane.data) vmax = std::max(vmax, v);
  }
  const std::size_t size = std::max<std::size_t>(detail::next_pow2(std::max(w, h)), 2);
  const FloatPlane haze = detail::plasma_fractal(size, c.p[1], c.rng);
  const double strength = c.p[0];
  for (auto& plane : c.img) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double v = plane(x, y) + strength * haze(x, y);
        plane(x, y) = std::clamp(v * vmax / (vmax + strength), 0.0, 1.0);
      }
    }
  }
}

// HSV value shift: with hue and saturation fixed, every channel scales by
// V'/V.
void brightness(Context& c) {
  const std::size_t n = c.img[0].data.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (const auto& plane : c.img) v = std::max(v, plane.data[i]);
    const double shifted = std::clamp(v + c.p[0], 0.0, 1.0);
    for (auto& plane : c.img) {
      plane.data[i] = v > 0.0 ? plane.data[i] * shifted / v : shifted;
    }
  }
}

void contrast(Context& c) {
  for (auto& plane : c.img) {
    double mean = 0.0;
    for (double v : plane.data) mean += v;
    mean /= static_cast<double>(plane.data.size());
    for (auto& v : plane.data) v = std::clamp((v - mean) * c.p[0] + mean, 0.0, 1.0);
  }
}

void elastic_transform(Context& c) {
  const std::size_t w = c.img[0].width;
  const std::size_t h = c.img[0].height;
  const double magnitude = c.p[0] * c.scale;
  const double sigma = c.p[1] * c.scale;
  auto field = [&] {
    FloatPlane f(w, h);
    for (auto& v : f.data) v = c.rng.uniform(-1.0, 1.0);
    f = detail::gaussian_blur(f, sigma);
    double ss = 0.0;
    for (double v : f.data) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(f.data.size()));
    for (auto& v : f.data) v = rms > 0.0 ? v / rms * magnitude : 0.0;
    return f;
  };
  const FloatPlane dx = field();
  const FloatPlane dy = field();
  for (auto& plane : c.img) {
    FloatPlane out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out(x, y) = plane.bilinear(static_cast<double>(x) + dx(x, y),
                                   static_cast<double>(y) + dy(x, y));
      }
    }
    detail::clip01(out);
    plane = std::move(out);
  }
}

// Area-average down to factor*size, nearest-neighbour back up.
void pixelate(Context& c) {
  const std::size_t w = c.img[0].width;
  const std::size_t h = c.img[0].height;
  const auto dw = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(w * c.p[0])));
  const auto dh = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(h * c.p[0])));
  const double sx = static_cast<double>(w) / static_cast<double>(dw);
  const double sy = static_cast<double>(h) / static_cast<double>(dh);
  auto coverage = [](double lo, double hi, std::size_t pixel) {
    const double a = std::max(lo, static_cast<double>(pixel));
    const double b = std::min(hi, static_cast<double>(pixel) + 1.0);
    return std::max(0.0, b - a);
  };
  for (auto& plane : c.img) {
    FloatPlane small(dw, dh);
    for (std::size_t oy = 0; oy < dh; ++oy) {
      const double y0 = oy * sy, y1 = (oy + 1) * sy;
      for (std::size_t ox = 0; ox < dw; ++ox) {
        const double x0 = ox * sx, x1 = (ox + 1) * sx;
        double acc = 0.0, area = 0.0;
        for (auto y = static_cast<std::size_t>(y0); y < std::min<std::size_t>(h, static_cast<std::size_t>(std::ceil(y1))); ++y) {
          const double wy = coverage(y0, y1, y);
          for (auto x = static_cast<std::size_t>(x0); x < std::min<std::size_t>(w, static_cast<std::size_t>(std::ceil(x1))); ++x) {
            const double wgt = wy * coverage(x0, x1, x);
            acc += wgt * plane(x, y);
            area += wgt;
          }
        }
        small(ox, oy) = area > 0.0 ? acc / area : 0.0;
      }
    }
    for (std::size_t y = 0; y < h; ++y) {
      const auto src_y = std::min(dh - 1, static_cast<std::size_t>((y + 0.5) / sy));
      for (std::size_t x = 0; x < w; ++x) {
        const auto src_x = std::min(dw - 1, static_cast<std::size_t>((x + 0.5) / sx));
        plane(x, y) = small(src_x, src_y);
      }
    }
  }
}

}  // namespace

const std::array<CatalogEntry, kCorruptionKindCount>& corruption_catalog() { return kCatalog; }

const CatalogEntry& catalog_entry(CorruptionKind kind) { return kCatalog[index_of(kind)]; }

std::string to_string(CorruptionKind kind) { return kKindNames[index_of(kind)]; }

std::string to_string(CorruptionFamily family) {
  switch (family) {
    case CorruptionFamily::noise: return "noise";
    case CorruptionFamily::blur: return "blur";
    case CorruptionFamily::weather: return "weather";
    case CorruptionFamily::digital: return "digital";
  }
  return "noise";
}

std::string to_string(RandomnessPolicy policy) {
  return policy == RandomnessPolicy::shared ? "shared" : "independent";
}

std::string to_string(CorruptionTarget target) {
  switch (target) {
    case CorruptionTarget::rgb: return "rgb";
    case CorruptionTarget::nir: return "nir";
    case CorruptionTarget::both: return "both";
  }
  return "both";
}

CorruptionKind parse_corruption_kind(const std::string& text) {
  for (std::size_t i = 0; i < kCorruptionKindCount; ++i) {
    if (text == kKindNames[i]) return static_cast<CorruptionKind>(i);
  }
  throw InvalidArgument("unknown corruption kind '" + text + "'");
}

RandomnessPolicy parse_randomness_policy(const std::string& text) {
  if (text == "shared") return RandomnessPolicy::shared;
  if (text == "independent") return RandomnessPolicy::independent;
  throw InvalidArgument("unknown randomness policy '" + text + "'");
}

CorruptionTarget parse_corruption_target(const std::string& text) {
  if (text == "rgb") return CorruptionTarget::rgb;
  if (text == "nir") return CorruptionTarget::nir;
  if (text == "both") return CorruptionTarget::both;
  throw InvalidArgument("unknown corruption target '" + text + "'");
}

RandomnessPolicy CorruptionSpec::effective_policy() const {
  return policy.value_or(catalog_entry(kind).policy);
}

void CorruptionSpec::validate() const { check_severity(severity); }

const SeverityTable& SeverityTable::defaults() {
  static const SeverityTable table = make_defaults();
  return table;
}

std::size_t SeverityTable::param_count(CorruptionKind kind) { return kParamCounts[index_of(kind)]; }

std::span<const double> SeverityTable::params(CorruptionKind kind, int severity) const {
  check_severity(severity);
  const auto& row = table_[index_of(kind)][static_cast<std::size_t>(severity - 1)];
  if (row.size() != param_count(kind)) {
    throw InvalidArgument("severity table has no entry for " + to_string(kind));
  }
  return row;
}

void SeverityTable::set(CorruptionKind kind, int severity, std::vector<double> values) {
  check_severity(severity);
  if (values.size() != param_count(kind)) {
    throw InvalidArgument(to_string(kind) + " takes " + std::to_string(param_count(kind)) +
                          " parameters, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite severity parameter");
  }
  table_[index_of(kind)][static_cast<std::size_t>(severity - 1)] = std::move(values);
}

SeverityTable SeverityTable::from_json(const nlohmann::json& doc) {
  SeverityTable t = defaults();
  if (doc.is_null()) return t;
  if (!doc.is_object()) throw FormatError("severity table must be a JSON object");
  for (const auto& [name, rows] : doc.items()) {
    const auto kind = parse_corruption_kind(name);
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(kMaxSeverity)) {
      throw FormatError("severity table entry '" + name + "' needs 5 rows");
    }
    for (int s = 1; s <= kMaxSeverity; ++s) {
      const auto& row = rows[static_cast<std::size_t>(s - 1)];
      std::vector<double> values;
      try {
        if (row.is_number()) {
          values.push_back(row.get<double>());
        } else {
          values = row.get<std::vector<double>>();
        }
      } catch (const nlohmann::json::exception& e) {
        throw FormatError("severity table entry '" + name + "': " + e.what());
      }
      t.set(kind, s, std::move(values));
    }
  }
  return t;
}

nlohmann::json SeverityTable::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& entry : kCatalog) {
    auto& rows = out[to_string(entry.kind)] = nlohmann::json::array();
    for (int s = 1; s <= kMaxSeverity; ++s) {
      const auto p = params(entry.kind, s);
      rows.push_back(std::vector<double>(p.begin(), p.end()));
    }
  }
  return out;
}

MultiChannelImage apply_corruption(const MultiChannelImage& img, CorruptionKind kind,
                                   int severity, std::uint64_t seed,
                                   const SeverityTable& table) {
  check_severity(severity);
  if (img.channel_count() != 3 || img.bit_depth() != 8) {
    throw InvalidArgument("corruptions need a 3-channel 8-bit image");
  }
  if (img.width() < kMinCorruptionSize || img.height() < kMinCorruptionSize) {
    throw InvalidArgument("image " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) + " is below the minimum working size " +
                          std::to_string(kMinCorruptionSize));
  }
  const auto params = table.params(kind, severity);

  if (kind == CorruptionKind::jpeg_compression) {
    const int quality = static_cast<int>(std::lround(params[0]));
    auto planes = detail::jpeg_roundtrip(img.planes(), img.width(), img.height(), quality);
    return MultiChannelImage(img.width(), img.height(), 8, img.channel_names(), std::move(planes));
  }

  FloatImage planes = detail::to_float(img);
  Xoshiro256pp rng(seed);
  Context ctx{planes, params,
              std::max(static_cast<double>(std::min(img.width(), img.height())) / 224.0,
                       kMinScale),
              rng};
  switch (kind) {
    case CorruptionKind::gaussian_noise: gaussian_noise(ctx); break;
    case CorruptionKind::shot_noise: shot_noise(ctx); break;
    case CorruptionKind::impulse_noise: impulse_noise(ctx); break;
    case CorruptionKind::defocus_blur: defocus_blur(ctx); break;
    case CorruptionKind::glass_blur: glass_blur(ctx); break;
    case CorruptionKind::motion_blur: motion_blur(ctx); break;
    case CorruptionKind::zoom_blur: zoom_blur(ctx); break;
    case CorruptionKind::snow: snow(ctx); break;
    case CorruptionKind::frost: frost(ctx); break;
    case CorruptionKind::fog: fog(ctx); break;
    case CorruptionKind::brightness: brightness(ctx); break;
    case CorruptionKind::contrast: contrast(ctx); break;
    case CorruptionKind::elastic_transform: elastic_transform(ctx); break;
    case CorruptionKind::pixelate: pixelate(ctx); break;
    case CorruptionKind::jpeg_compression: break;
  }
  return detail::to_image(planes, img);
}

CorruptedPair corrupt_multispectral(const MultiChannelImage& rgb, const MultiChannelImage& nir,
                                    const CorruptionSpec& spec, const SeverityTable& table,
                                    std::uint64_t item_hash) {
  spec.validate();
  if (rgb.channel_count() != 3 || nir.channel_count() != 1) {
    throw InvalidArgument("corrupt_multispectral needs a 3-channel RGB and a 1-channel NIR image");
  }
  if (rgb.width() != nir.width() || rgb.height() != nir.height()) {
    throw InvalidArgument("RGB and NIR shapes differ");
  }
  if (rgb.bit_depth() != 8 || nir.bit_depth() != 8) {
    throw InvalidArgument("corrupt_multispectral needs 8-bit inputs");
  }
  const bool shared = spec.effective_policy() == RandomnessPolicy::shared;
  const std::uint64_t rgb_seed =
      derive_seed(spec.seed, item_hash, shared ? kSharedGroupTag : kRgbGroupTag);
  const std::uint64_t nir_seed =
      derive_seed(spec.seed, item_hash, shared ? kSharedGroupTag : kNirGroupTag);

  CorruptedPair out{rgb, nir};
  if (spec.target != CorruptionTarget::nir) {
    out.rgb = apply_corruption(rgb, spec.kind, spec.severity, rgb_seed, table);
  }
  if (spec.target != CorruptionTarget::rgb) {
    const auto stacked = apply_corruption(replicate_channel(nir, 3), spec.kind, spec.severity,
                                          nir_seed, table);
    out.nir = take_channel(stacked, 0);
  }
  return out;
}

double psnr(const MultiChannelImage& a, const MultiChannelImage& b) {
  if (a.width() != b.width() || a.height() != b.height() ||
      a.channel_count() != b.channel_count() || a.bit_depth() != b.bit_depth()) {
    throw InvalidArgument("psnr: shape or bit depth mismatch");
  }
  std::uint64_t sse = 0;
  std::uint64_t count = 0;
  for (std::size_t c = 0; c < a.channel_count(); ++c) {
    const auto& pa = a.planes()[c];
    const auto& pb = b.planes()[c];
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const std::int64_t d = static_cast<std::int64_t>(pa[i]) - pb[i];
      sse += static_cast<std::uint64_t>(d * d);
    }
    count += pa.size();
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(count);
  const double peak = a.max_value();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace specband
