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

#include <doctest.h>

#include <algorithm>

#include "specband/error.hpp"
#include "specband/radiometric.hpp"
#include "test_util.hpp"

using namespace specband;
using namespace specband::testing;

namespace {

MultiChannelImage single(std::vector<std::string> names, std::vector<Sample> values,
                         int bit_depth) {
  std::vector<Plane> planes;
  for (Sample v : values) planes.push_back({v});
  return MultiChannelImage(1, 1, bit_depth, std::move(names), std::move(planes));
}

MultiChannelImage ramp16(std::size_t w, std::size_t h) {
  return make_image(
      w, h, {"R", "G", "B", "NIR"},
      [&](std::size_t c, std::size_t x, std::size_t y) {
        const double t = static_cast<double>(y * w + x) / static_cast<double>(w * h - 1);
        return static_cast<Sample>(std::lround(t * (60000.0 - 3000.0 * c) + 500.0 * c));
      },
      16);
}

}  // namespace

TEST_CASE("Brovey on a single pixel") {
  const auto ms = single({"A", "B"}, {100, 200}, 16);
  const auto pan = single({"P"}, {180}, 16);
  const auto out = brovey_pansharpen(ms, pan, {0.5, 0.5});
  CHECK(out.at(0, 0, 0) == 120);
  CHECK(out.at(1, 0, 0) == 240);
  // Uniform weights are the default.
  CHECK(brovey_pansharpen(ms, pan, {}) == out);
}

TEST_CASE("Brovey identity and zero denominator") {
  const auto ms = MultiChannelImage::filled(3, 2, 16, {"R", "G", "B"}, 1234);
  const auto pan = MultiChannelImage::filled(3, 2, 16, {"P"}, 1234);
  CHECK(brovey_pansharpen(ms, pan, {}) == ms);
  const auto zero = MultiChannelImage::filled(3, 2, 16, {"R", "G", "B"}, 0);
  const auto bright = MultiChannelImage::filled(3, 2, 16, {"P"}, 60000);
  CHECK(brovey_pansharpen(zero, bright, {}) == zero);
}

TEST_CASE("Brovey upsamples by integer ratios only") {
  const auto ms = MultiChannelImage::filled(2, 2, 16, {"R", "G"}, 500);
  const auto pan = MultiChannelImage::filled(8, 8, 16, {"P"}, 500);
  const auto out = brovey_pansharpen(ms, pan, {0.5, 0.5});
  CHECK(out.width() == 8);
  CHECK(out.height() == 8);
  CHECK(out == MultiChannelImage::filled(8, 8, 16, {"R", "G"}, 500));
  CHECK_THROWS_AS(brovey_pansharpen(ms, MultiChannelImage::filled(5, 4, 16, {"P"}), {}),
                  InvalidArgument);
  CHECK_THROWS_AS(brovey_pansharpen(ms, pan, {0.3, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(brovey_pansharpen(ms, pan, {1.0}), InvalidArgument);
}

TEST_CASE("rescale 16 to 8 bit") {
  const auto out = rescale_16_to_8(single({"a", "b", "c", "d"}, {0, 65535, 32768, 257}, 16));
  CHECK(out.bit_depth() == 8);
  CHECK(out.at(0, 0, 0) == 0);
  CHECK(out.at(1, 0, 0) == 255);
  CHECK(out.at(2, 0, 0) == 128);
  CHECK(out.at(3, 0, 0) == 1);
  CHECK_THROWS_AS(rescale_16_to_8(constant(1, 1, {"a"}, 3)), InvalidArgument);
}

TEST_CASE("gamma correction") {
  const auto img = single({"a", "b", "c"}, {0, 255, 128}, 8);
  for (double g : {0.5, 1.0, 2.2, 3.0}) {
    const auto out = gamma_correct(img, g);
    CHECK(out.at(0, 0, 0) == 0);
    CHECK(out.at(1, 0, 0) == 255);
  }
  // 255 * (128/255)^(1/2.2) = 186.4 (tests/oracles/scalar_oracle.py).
  CHECK(gamma_correct(img, 2.2).at(2, 0, 0) == 186);
  const auto ramp = make_image(16, 16, {"L"}, [](std::size_t, std::size_t x, std::size_t y) {
    return static_cast<Sample>(y * 16 + x);
  });
  CHECK(gamma_correct(ramp, 1.0) == ramp);
  CHECK_THROWS_AS(gamma_correct(ramp, 0.0), InvalidArgument);
}

TEST_CASE("percentile clip stretch") {
  SUBCASE("two-point channel") {
    const auto img = make_image(4, 4, {"L"}, [](std::size_t, std::size_t x, std::size_t) {
      return static_cast<Sample>(x < 2 ? 10 : 20);
    });
    const auto r = percentile_clip_stretch(img, 0.01);
    CHECK(r.degenerate_channels.empty());
    for (std::size_t x = 0; x < 4; ++x) CHECK(r.image.at(0, x, 0) == (x < 2 ? 0 : 255));
  }
  SUBCASE("uniform full range is a fixed point at clip 0") {
    const auto img = make_image(32, 16, {"L"}, [](std::size_t, std::size_t x, std::size_t y) {
      return static_cast<Sample>((y * 32 + x) % 256);
    });
    CHECK(percentile_clip_stretch(img, 0.0).image == img);
  }
  SUBCASE("constant channel is degenerate") {
    const auto img = make_image(3, 3, {"A", "B"}, [](std::size_t c, std::size_t x, std::size_t) {
      return static_cast<Sample>(c == 0 ? 77 : x * 50);
    });
    const auto r = percentile_clip_stretch(img, 0.01);
    CHECK(r.degenerate_channels == std::vector<std::string>{"A"});
    for (Sample v : r.image.planes()[0]) CHECK(v == 0);
    CHECK(*std::max_element(r.image.planes()[1].begin(), r.image.planes()[1].end()) == 255);
  }
  SUBCASE("low tail is clipped") {
    // 1 of 100 samples at 0, the rest spread over 50..149.
    const auto img = make_image(100, 1, {"L"}, [](std::size_t, std::size_t x, std::size_t) {
      return static_cast<Sample>(x == 0 ? 0 : 49 + x);
    });
    const auto r = percentile_clip_stretch(img, 0.02);
    CHECK(r.image.at(0, 0, 0) == 0);
    CHECK(r.image.at(0, 1, 0) == 0);
    CHECK(r.image.at(0, 99, 0) == 255);
  }
  CHECK_THROWS_AS(percentile_clip_stretch(constant(1, 1, {"a"}, 0), 0.5), InvalidArgument);
}

TEST_CASE("preprocess_scene equals the stage-by-stage composition") {
  const auto ms = ramp16(16, 8);
  RadiometricConfig cfg;
  const auto out = preprocess_scene(ms, std::nullopt, cfg, {rgb_group(), nir_group()});
  const auto manual =
      percentile_clip_stretch(gamma_correct(rescale_16_to_8(ms), cfg.gamma), cfg.clip_fraction);
  CHECK(out.image == manual.image);
  REQUIRE(out.groups.size() == 2);
  CHECK(out.groups[0] == extract_group(manual.image, rgb_group()));
  CHECK(out.groups[1] == extract_group(manual.image, nir_group()));
  for (const auto& plane : out.image.planes()) {
    CHECK(*std::min_element(plane.begin(), plane.end()) == 0);
    CHECK(*std::max_element(plane.begin(), plane.end()) == 255);
  }

  RadiometricConfig swapped = cfg;
  swapped.stretch_before_gamma = true;
  const auto alt = preprocess_scene(ms, std::nullopt, swapped, {});
  CHECK(alt.image == gamma_correct(percentile_clip_stretch(rescale_16_to_8(ms), 0.01).image, 2.2));
}

TEST_CASE("pansharpening with a consistent pan band changes nothing") {
  // Every sample is a multiple of 4, so the band mean is an exact integer.
  const auto ms = make_image(
      4, 4, {"R", "G", "B", "NIR"},
      [](std::size_t c, std::size_t x, std::size_t y) {
        return static_cast<Sample>((y * 4 + x) * 2400 + c * 1000 + 4);
      },
      16);
  std::vector<Plane> pan_plane(1, Plane(16));
  for (std::size_t i = 0; i < 16; ++i) {
    double s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += 0.25 * ms.planes()[c][i];
    pan_plane[0][i] = quantize(s, 65535);
  }
  const MultiChannelImage pan(4, 4, 16, {"PAN"}, pan_plane);
  RadiometricConfig plain;
  RadiometricConfig sharp;
  sharp.pansharpen = true;
  const auto a = preprocess_scene(ms, std::nullopt, plain, {});
  const auto b = preprocess_scene(ms, pan, sharp, {});
  CHECK(a.image == b.image);
  CHECK_THROWS_AS(preprocess_scene(ms, std::nullopt, sharp, {}), InvalidArgument);
  CHECK_THROWS_AS(preprocess_scene(ms, pan, plain, {}), InvalidArgument);
}

TEST_CASE("radiometric config validation and JSON") {
  RadiometricConfig cfg;
  cfg.gamma = 1.8;
  cfg.brovey_weights = {0.25, 0.25, 0.5};
  CHECK(RadiometricConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  CHECK_THROWS_AS(RadiometricConfig::from_json({{"gamma", -1.0}}), InvalidArgument);
  CHECK_THROWS_AS(RadiometricConfig::from_json({{"clip_fraction", 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(RadiometricConfig::from_json({{"brovey_weights", {0.5, 0.6}}}),
                  InvalidArgument);
  CHECK_THROWS_AS(RadiometricConfig::from_json({{"gamma", "x"}}), FormatError);
}
