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

#include <cmath>
#include <limits>
#include <set>

#include "specband/corruptions.hpp"
#include "specband/error.hpp"
#include "test_util.hpp"

using namespace specband;
using namespace specband::testing;

TEST_CASE("catalog has fifteen kinds with the documented policies") {
  const auto& cat = corruption_catalog();
  CHECK(cat.size() == 15);
  std::set<std::string> names;
  for (const auto& e : cat) {
    names.insert(to_string(e.kind));
    CHECK(parse_corruption_kind(to_string(e.kind)) == e.kind);
  }
  CHECK(names.size() == 15);
  CHECK(catalog_entry(CorruptionKind::motion_blur).policy == RandomnessPolicy::shared);
  CHECK(catalog_entry(CorruptionKind::shot_noise).policy == RandomnessPolicy::independent);
  CHECK(catalog_entry(CorruptionKind::gaussian_noise).policy == RandomnessPolicy::independent);
  CHECK(catalog_entry(CorruptionKind::impulse_noise).policy == RandomnessPolicy::independent);
  CHECK(catalog_entry(CorruptionKind::snow).policy == RandomnessPolicy::shared);
  CHECK_THROWS_AS(parse_corruption_kind("rain"), InvalidArgument);
  CHECK(parse_corruption_target("nir") == CorruptionTarget::nir);
}

TEST_CASE("every kind is deterministic and preserves shape") {
  const auto img = photo_like(64, 60, 11);
  for (const auto& e : corruption_catalog()) {
    for (int s : {1, 5}) {
      CAPTURE(to_string(e.kind));
      CAPTURE(s);
      const auto a = apply_corruption(img, e.kind, s, 99);
      const auto b = apply_corruption(img, e.kind, s, 99);
      CHECK(a == b);
      CHECK(a.width() == img.width());
      CHECK(a.height() == img.height());
      CHECK(a.channel_names() == img.channel_names());
      CHECK(a != img);
    }
  }
}

TEST_CASE("noise depends on the seed") {
  const auto img = photo_like(32, 32, 2);
  CHECK(apply_corruption(img, CorruptionKind::gaussian_noise, 2, 1) !=
        apply_corruption(img, CorruptionKind::gaussian_noise, 2, 2));
}

TEST_CASE("brightness on a constant image") {
  const auto img = constant(32, 32, {"R", "G", "B"}, 128);
  // 128/255 + offset, back to 8 bit: offsets 0.2, 0.4, 0.5.
  const std::pair<int, Sample> cases[] = {{2, 179}, {4, 230}, {5, 255}};
  for (const auto& [s, expected] : cases) {
    CHECK(apply_corruption(img, CorruptionKind::brightness, s, 0) ==
          constant(32, 32, {"R", "G", "B"}, expected));
  }
}

TEST_CASE("input validation") {
  const auto img = photo_like(32, 32, 1);
  CHECK_THROWS_AS(apply_corruption(img, CorruptionKind::fog, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(apply_corruption(img, CorruptionKind::fog, 6, 0), InvalidArgument);
  CHECK_THROWS_AS(apply_corruption(constant(32, 32, {"L"}, 0), CorruptionKind::fog, 1, 0),
                  InvalidArgument);
  CHECK_THROWS_AS(apply_corruption(photo_like(16, 40, 1), CorruptionKind::fog, 1, 0),
                  InvalidArgument);
}

TEST_CASE("severity table overrides") {
  auto doc = nlohmann::json::object();
  doc["gaussian_noise"] = {0.01, 0.02, 0.03, 0.04, 0.05};
  const auto t = SeverityTable::from_json(doc);
  CHECK(t.params(CorruptionKind::gaussian_noise, 3)[0] == doctest::Approx(0.03));
  CHECK(t.params(CorruptionKind::fog, 1)[0] ==
        SeverityTable::defaults().params(CorruptionKind::fog, 1)[0]);
  CHECK(SeverityTable::from_json(t.to_json()).to_json() == t.to_json());
  auto bad = nlohmann::json::object();
  bad["motion_blur"] = {1, 2, 3, 4, 5};
  CHECK_THROWS(SeverityTable::from_json(bad));
  auto unknown = nlohmann::json::object();
  unknown["rain"] = {1, 2, 3, 4, 5};
  CHECK_THROWS(SeverityTable::from_json(unknown));
}

TEST_CASE("psnr") {
  const auto a = constant(2, 2, {"L"}, 0);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, constant(2, 2, {"L"}, 255)) == doctest::Approx(0.0));
  const MultiChannelImage b(2, 2, 8, {"L"}, {Plane{1, 0, 0, 0}});
  // 10 log10(255^2 / (1/4)).
  CHECK(psnr(a, b) == doctest::Approx(54.1514).epsilon(1e-6));
  CHECK_THROWS_AS(psnr(a, constant(2, 1, {"L"}, 0)), InvalidArgument);
}

TEST_CASE("corrupt_multispectral targets and randomness policies") {
  const auto rgb = photo_like(48, 40, 5);
  const auto nir = take_channel(rgb, 0);
  const auto nir_named = rename_channels(nir, {"NIR"});

  CorruptionSpec spec;
  spec.kind = CorruptionKind::fog;
  spec.severity = 3;
  spec.seed = 17;
  spec.target = CorruptionTarget::rgb;
  auto out = corrupt_multispectral(rgb, nir_named, spec);
  CHECK(out.nir == nir_named);
  CHECK(out.rgb != rgb);

  spec.target = CorruptionTarget::nir;
  out = corrupt_multispectral(rgb, nir_named, spec);
  CHECK(out.rgb == rgb);
  CHECK(out.nir.channel_names() == std::vector<std::string>{"NIR"});
  CHECK(out.nir != nir_named);

  spec.target = CorruptionTarget::both;
  spec.kind = CorruptionKind::motion_blur;
  out = corrupt_multispectral(rgb, nir_named, spec);
  CHECK(out.nir.planes()[0] == out.rgb.planes()[0]);

  spec.kind = CorruptionKind::gaussian_noise;
  out = corrupt_multispectral(rgb, nir_named, spec);
  CHECK(out.nir.planes()[0] != out.rgb.planes()[0]);

  spec.policy = RandomnessPolicy::shared;
  out = corrupt_multispectral(rgb, nir_named, spec);
  CHECK(out.nir.planes()[0] == out.rgb.planes()[0]);
}

TEST_CASE("corrupt_dataset") {
  TempDir dir("corrupt");
  const auto manifest = write_dataset(
      dir.path() / "data", 2, [](std::size_t i) { return photo_like(32, 32, 40 + i); },
      [](std::size_t i) { return rename_channels(take_channel(photo_like(32, 32, 50 + i), 1), {"NIR"}); },
      {0, 1}, 2);

  SUBCASE("no specs") {
    const auto r = corrupt_dataset(manifest, {}, dir / "none");
    CHECK(r.variants.empty());
    CHECK(r.failures.empty());
    CHECK(r.manifest.items.size() == manifest.items.size());
  }
  SUBCASE("counting, paths and determinism") {
    std::vector<CorruptionSpec> specs;
    for (const auto& e : corruption_catalog()) {
      for (int s = 1; s <= 5; ++s) specs.push_back({e.kind, s, CorruptionTarget::both, 3, {}});
    }
    const auto r = corrupt_dataset(manifest, specs, dir / "a");
    CHECK(r.failures.empty());
    REQUIRE(r.variants.size() == 150);
    const auto loaded = load_variant_records(dir / "a" / kVariantManifestName);
    CHECK(loaded.size() == 150);
    for (const auto& v : r.variants) {
      REQUIRE(fs::exists(v.rgb_path));
      REQUIRE(fs::exists(v.nir_path));
    }
    CorruptDatasetOptions opts;
    opts.threads = 3;
    const auto again = corrupt_dataset(manifest, specs, dir / "b", SeverityTable::defaults(), opts);
    REQUIRE(again.variants.size() == 150);
    for (std::size_t i = 0; i < 150; ++i) {
      CHECK(read_file(r.variants[i].rgb_path) == read_file(again.variants[i].rgb_path));
      CHECK(read_file(r.variants[i].nir_path) == read_file(again.variants[i].nir_path));
    }
    CHECK(read_file(dir / "a" / kVariantManifestName) ==
          read_file(dir / "b" / kVariantManifestName));
  }
  SUBCASE("untargeted group references the source") {
    const auto r = corrupt_dataset(
        manifest, {{CorruptionKind::contrast, 2, CorruptionTarget::rgb, 0, {}}}, dir / "c");
    REQUIRE(r.variants.size() == 2);
    CHECK(load_raster(r.variants[0].nir_path) == load_raster(manifest.resolve(manifest.items[0].nir_path)));
  }
  SUBCASE("failures are reported per item") {
    auto broken = manifest;
    broken.items[1].rgb_path = "img/missing.png";
    const auto r = corrupt_dataset(
        broken, {{CorruptionKind::contrast, 2, CorruptionTarget::both, 0, {}}}, dir / "d");
    CHECK(r.variants.size() == 1);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].rfind("item0001", 0) == 0);
  }
}
