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

#include "specband/error.hpp"
#include "specband/metrics.hpp"
#include "test_util.hpp"

using namespace specband;
using namespace specband::testing;

namespace {

MultiChannelImage mask2x2(Sample a, Sample b, Sample c, Sample d) {
  return MultiChannelImage(2, 2, 8, {"L"}, {Plane{a, b, c, d}});
}

RobustnessRecord rec(const std::string& model, std::optional<CorruptionKind> kind, int severity,
                     CorruptionTarget target, const std::string& seed, double acc) {
  return {model, kind, severity, target, seed, acc};
}

}  // namespace

TEST_CASE("zero-one accuracy") {
  const LabelMap labels = {{"a", 0}, {"b", 1}, {"c", 2}, {"d", 1}};
  CHECK(zero_one_accuracy(labels, labels) == 1.0);
  CHECK(zero_one_accuracy({{"a", 1}, {"b", 0}, {"c", 0}, {"d", 0}}, labels) == 0.0);
  CHECK(zero_one_accuracy({{"a", 0}, {"b", 1}, {"c", 2}, {"d", 0}}, labels) == 0.75);
  CHECK_THROWS_AS(zero_one_accuracy({{"a", 0}}, labels), InvalidArgument);
  CHECK_THROWS_AS(zero_one_accuracy({}, {}), InvalidArgument);
}

TEST_CASE("confusion matrix") {
  const LabelMap labels = {{"a", 0}, {"b", 1}, {"c", 2}};
  const auto diag = confusion_matrix(labels, labels, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(diag[i][j] == (i == j ? 1u : 0u));
  }
  const auto one = confusion_matrix({{"x", 0}}, {{"x", 2}}, 3);
  CHECK(one[2][0] == 1);
  std::uint64_t total = 0;
  for (const auto& row : one) {
    for (auto v : row) total += v;
  }
  CHECK(total == 1);
  CHECK_THROWS_AS(confusion_matrix({{"x", 3}}, {{"x", 0}}, 3), InvalidArgument);
}

TEST_CASE("majority vote") {
  CHECK(majority_vote_accuracy(std::vector<int>{4, 4, 4}) == 1.0);
  CHECK(majority_vote_accuracy(std::vector<int>{0, 0, 1}) == doctest::Approx(2.0 / 3.0));
  std::vector<int> uniform;
  for (int i = 0; i < 100; ++i) uniform.push_back(i % 5);
  CHECK(majority_vote_accuracy(uniform) == doctest::Approx(0.2));
  CHECK(majority_vote_accuracy(LabelMap{{"a", 1}, {"b", 1}, {"c", 0}, {"d", 2}}) == 0.5);
}

TEST_CASE("IoU") {
  const auto same = iou(mask2x2(0, 1, 1, 0), mask2x2(0, 1, 1, 0), 2);
  CHECK(*same.per_class[0] == 1.0);
  CHECK(*same.per_class[1] == 1.0);
  CHECK(*same.mean == 1.0);

  const auto disjoint = iou(mask2x2(0, 0, 0, 0), mask2x2(1, 1, 1, 1), 2);
  CHECK(*disjoint.per_class[0] == 0.0);
  CHECK(*disjoint.per_class[1] == 0.0);

  const auto ex = iou(mask2x2(0, 0, 1, 1), mask2x2(0, 1, 1, 1), 2);
  CHECK(*ex.per_class[0] == doctest::Approx(1.0 / 2.0));
  CHECK(*ex.per_class[1] == doctest::Approx(2.0 / 3.0));
  CHECK(*ex.mean == doctest::Approx(7.0 / 12.0));

  const auto undefined = iou(mask2x2(0, 0, 0, 0), mask2x2(0, 0, 0, 0), 3);
  CHECK_FALSE(undefined.per_class[1].has_value());
  CHECK(*undefined.mean == 1.0);

  const auto excluded = iou(mask2x2(0, 0, 1, 1), mask2x2(0, 1, 1, 1), 2, {0});
  CHECK(*excluded.mean == doctest::Approx(2.0 / 3.0));
  const auto nothing = iou(mask2x2(0, 0, 0, 0), mask2x2(0, 0, 0, 0), 2, {0});
  CHECK_FALSE(nothing.mean.has_value());

  CHECK_THROWS_AS(iou(mask2x2(0, 0, 0, 5), mask2x2(0, 0, 0, 0), 2), InvalidArgument);
}

TEST_CASE("IoU accumulation pools counts") {
  IouAccumulator acc(2);
  const auto a = mask2x2(0, 0, 1, 1);
  const auto b = mask2x2(0, 1, 1, 1);
  acc.add(a.plane(0), b.plane(0));
  IouAccumulator other(2);
  other.add(mask2x2(1, 1, 1, 1).plane(0), mask2x2(1, 1, 0, 0).plane(0));
  acc.add(other);
  CHECK(acc.intersections() == std::vector<std::uint64_t>{1, 4});
  CHECK(acc.unions() == std::vector<std::uint64_t>{4, 7});
  CHECK(*acc.result().mean == doctest::Approx((0.25 + 4.0 / 7.0) / 2.0));
}

// Golden permutations from tests/oracles/prng_oracle.py.
TEST_CASE("counterfactual plans") {
  CHECK(make_counterfactual_plan(5, ShuffleChannel::nir, 0, 1).permutations.empty());
  const auto single = make_counterfactual_plan(1, ShuffleChannel::nir, 4, 9);
  REQUIRE(single.permutations.size() == 4);
  for (const auto& p : single.permutations) CHECK(p == std::vector<std::size_t>{0});
  const auto golden = make_counterfactual_plan(4, ShuffleChannel::nir, 2, 7);
  REQUIRE(golden.permutations.size() == 2);
  CHECK(golden.permutations[0] == std::vector<std::size_t>{3, 0, 2, 1});
  CHECK(golden.permutations[1] == std::vector<std::size_t>{3, 2, 1, 0});
  CHECK(make_counterfactual_plan(4, ShuffleChannel::rgb, 2, 7).permutations ==
        golden.permutations);

  TempDir dir("plan");
  auto plan = make_counterfactual_plan(6, ShuffleChannel::rgb, 3, 5);
  plan.split = Split::test;
  plan.save(dir / "plan.json");
  const auto back = CounterfactualPlan::load(dir / "plan.json");
  CHECK(back.permutations == plan.permutations);
  CHECK(back.channel == ShuffleChannel::rgb);
  CHECK(back.split == Split::test);
  CHECK(back.seed == 5);

  auto broken = plan;
  broken.permutations[0] = {0, 0, 1, 2, 3, 4};
  CHECK_THROWS_AS(broken.validate(), InvalidArgument);
  CHECK_THROWS_AS(CounterfactualPlan::from_json(broken.to_json()), InvalidArgument);
}

TEST_CASE("perceptual score arithmetic") {
  const std::vector<double> blind = {0.8, 0.8, 0.8};
  const auto zero = perceptual_score(0.8, blind, 0.5);
  CHECK(zero.ps_model == 0.0);
  CHECK(zero.ps_task == 0.0);

  const std::vector<double> shuffled = {0.69};
  const auto r = perceptual_score(0.92, shuffled, 0.2);
  CHECK(r.ps_model == doctest::Approx(0.25));
  CHECK(r.ps_task == doctest::Approx(1.15));

  const std::vector<double> two = {0.6, 0.78};
  const auto m = perceptual_score(0.92, two, 0.2, ShuffleChannel::rgb);
  CHECK(m.ps_model == doctest::Approx(0.25));
  REQUIRE(m.per_permutation_model.size() == 2);
  CHECK(m.per_permutation_model[0] == doctest::Approx(0.32 / 0.92));
  CHECK(m.channel == ShuffleChannel::rgb);

  CHECK_THROWS_AS(perceptual_score(0.0, shuffled, 0.2), InvalidArgument);
  CHECK_THROWS_AS(perceptual_score(0.9, shuffled, 0.0), InvalidArgument);
  CHECK_THROWS_AS(perceptual_score(0.9, std::vector<double>{}, 0.2), InvalidArgument);
}

TEST_CASE("prediction variant names") {
  const auto c = PredictionVariant::corrupted(CorruptionKind::motion_blur, 3, CorruptionTarget::nir);
  CHECK(c.to_string() == "corrupted-motion_blur-s3-nir");
  CHECK(PredictionVariant::parse(c.to_string()) == c);
  CHECK(PredictionVariant::counterfactual(ShuffleChannel::rgb, 4).to_string() == "cf-rgb-p4");
  CHECK(PredictionVariant::parse("cf-nir-p12").permutation == 12);
  CHECK(PredictionVariant::parse("clean").type == PredictionVariant::Type::clean);
  CHECK_THROWS_AS(PredictionVariant::parse("corrupted-motion_blur-s9-nir"), InvalidArgument);
  CHECK_THROWS_AS(PredictionVariant::parse("dirty"), InvalidArgument);
}

TEST_CASE("classification prediction manifests") {
  TempDir dir("preds");
  const auto data = write_dataset(
      dir.path() / "data", 4, [](std::size_t) { return constant(2, 2, {"R", "G", "B"}, 0); },
      [](std::size_t) { return constant(2, 2, {"NIR"}, 0); }, {0, 1, 1, 0}, 2,
      {Split::train, Split::train, Split::test, Split::test});
  PredictionManifest pm;
  pm.model_id = "m";
  for (std::size_t i = 0; i < 4; ++i) pm.records[data.items[i].item_id].pred = 1;
  const auto path = pm.save(dir.path() / "preds");
  CHECK(path == dir.path() / "preds" / "m" / "clean" / "0.jsonl");
  const auto back = PredictionManifest::load(path);
  CHECK(back.model_id == "m");
  CHECK(back.records.size() == 4);
  const auto fn = AccuracyFunction::for_manifest(data);
  CHECK(evaluate_manifest(data, back, fn) == 0.5);
  CHECK(evaluate_manifest(data, back, fn, Split::train) == 0.5);
  CHECK(baseline_accuracy(data, fn) == 0.5);

  auto partial = back;
  partial.records.erase(data.items[2].item_id);
  CHECK(evaluate_manifest(data, partial, fn, Split::train) == 0.5);
  CHECK_THROWS_AS(evaluate_manifest(data, partial, fn), InvalidArgument);
  auto extra = back;
  extra.records["ghost"].pred = 0;
  CHECK_THROWS_AS(evaluate_manifest(data, extra, fn), InvalidArgument);
}

TEST_CASE("segmentation evaluation pools or averages per item") {
  TempDir dir("seg");
  DatasetManifest data;
  data.task = Task::segmentation;
  data.label_set = {"bg", "fg"};
  const std::vector<MultiChannelImage> labels = {mask2x2(0, 1, 1, 1), mask2x2(1, 1, 0, 0)};
  const std::vector<MultiChannelImage> preds = {mask2x2(0, 0, 1, 1), mask2x2(1, 1, 1, 1)};
  PredictionManifest pm;
  pm.model_id = "seg";
  for (std::size_t i = 0; i < 2; ++i) {
    ManifestItem item;
    item.item_id = "t" + std::to_string(i);
    item.rgb_path = item.item_id + "_rgb.png";
    item.nir_path = item.item_id + "_nir.png";
    item.mask_path = item.item_id + "_mask.png";
    save_raster(labels[i], dir / item.mask_path.string());
    data.items.push_back(item);
    const auto rel = fs::path("0") / (item.item_id + ".png");
    save_raster(preds[i], dir.path() / "preds" / "seg" / "clean" / rel);
    pm.records[item.item_id].mask_path = rel;
  }
  data.save(dir / "manifest.json");
  const auto loaded = DatasetManifest::load(dir / "manifest.json");
  const auto pred = PredictionManifest::load(pm.save(dir.path() / "preds"));

  auto fn = AccuracyFunction::for_manifest(loaded);
  CHECK(fn.num_classes == 2);
  CHECK(evaluate_manifest(loaded, pred, fn) == doctest::Approx(23.0 / 56.0));
  fn.aggregation = IouAggregation::per_item;
  CHECK(evaluate_manifest(loaded, pred, fn) == doctest::Approx(5.0 / 12.0));
  // Constant class-1 prediction: class 0 IoU 0, class 1 IoU 5/8.
  fn.aggregation = IouAggregation::pooled;
  CHECK(baseline_accuracy(loaded, fn) == doctest::Approx(5.0 / 16.0));
}

TEST_CASE("robustness curves") {
  using K = CorruptionKind;
  using T = CorruptionTarget;
  SUBCASE("single seed") {
    const std::vector<RobustnessRecord> records = {
        rec("m", std::nullopt, 0, T::both, "0", 0.9),
        rec("m", K::fog, 1, T::rgb, "0", 0.8),
        rec("m", K::fog, 2, T::rgb, "0", 0.6),
    };
    const auto curves = robustness_curves(records);
    REQUIRE(curves.size() == 1);
    REQUIRE(curves[0].points.size() == 3);
    CHECK(curves[0].points[0].severity == 0);
    CHECK(curves[0].points[0].mean == 0.9);
    CHECK(curves[0].points[2].mean == 0.6);
    CHECK(curves[0].points[2].ci_low == curves[0].points[2].ci_high);
  }
  SUBCASE("two seeds") {
    const std::vector<RobustnessRecord> records = {
        rec("m", K::fog, 1, T::nir, "a", 0.8),
        rec("m", K::fog, 1, T::nir, "b", 0.9),
    };
    const auto p = robustness_curves(records)[0].points[0];
    CHECK(p.mean == doctest::Approx(0.85));
    CHECK(p.n_seeds == 2);
    const double hw = 1.96 * std::sqrt(0.005) / std::sqrt(2.0);
    CHECK(p.ci_high - p.mean == doctest::Approx(hw));
    CHECK(hw == doctest::Approx(0.098).epsilon(0.01));
  }
  SUBCASE("kinds averaged within a seed; clean anchors every target") {
    const std::vector<RobustnessRecord> records = {
        rec("m", std::nullopt, 0, T::both, "0", 1.0),
        rec("m", K::fog, 3, T::rgb, "0", 0.5),
        rec("m", K::snow, 3, T::rgb, "0", 0.7),
        rec("m", K::fog, 3, T::nir, "0", 0.9),
        rec("m", K::snow, 3, T::nir, "0", 0.9),
    };
    const auto curves = robustness_curves(records);
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].target == T::rgb);
    CHECK(curves[0].points[0].mean == 1.0);
    CHECK(curves[0].points[1].mean == doctest::Approx(0.6));
    CHECK(curves[1].points[0].mean == 1.0);
    CHECK(curves[1].points[1].mean == doctest::Approx(0.9));
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(robustness_curves({rec("m", K::fog, 1, T::rgb, "0", 0.5),
                                       rec("m", K::fog, 1, T::rgb, "0", 0.6)}),
                    InvalidArgument);
    CHECK_THROWS_AS(robustness_curves({rec("m", K::fog, 1, T::rgb, "0", 1.5)}), InvalidArgument);
    CHECK_THROWS_AS(robustness_curves({rec("m", K::fog, 1, T::rgb, "0", 0.5),
                                       rec("m", K::snow, 1, T::rgb, "0", 0.5),
                                       rec("m", K::fog, 1, T::rgb, "1", 0.5)}),
                    InvalidArgument);
  }
  CHECK(ci_half_width(std::vector<double>{0.3}) == 0.0);
}
