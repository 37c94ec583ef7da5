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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "specband/cli.hpp"
#include "specband/corruptions.hpp"
#include "specband/dataset.hpp"
#include "specband/metrics.hpp"
#include "specband/probes.hpp"
#include "specband/radiometric.hpp"
#include "test_util.hpp"

using namespace specband;
using namespace specband::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int bucket(double mean, int num_classes) {
  return std::clamp(static_cast<int>(std::floor(mean * num_classes / 256.0)), 0, num_classes - 1);
}

ProbeModel probe(ProbeKind kind, int num_classes) {
  ProbeModel m;
  m.kind = kind;
  m.num_classes = num_classes;
  return m;
}

double mean_of(const MultiChannelImage& img) {
  double s = 0;
  for (const auto& p : img.planes()) {
    for (Sample v : p) s += v;
  }
  return s / static_cast<double>(img.pixel_count() * img.channel_count());
}

// --- 1 ------------------------------------------------------------------------
Outcome channel_blindness() {
  const auto t0 = std::chrono::steady_clock::now();
  TempDir dir("acc1");
  const int nc = 4;
  std::vector<MultiChannelImage> rgb;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 200; ++i) {
    rgb.push_back(random_image(8, 8, {"R", "G", "B"}, 1000 + i));
    labels.push_back(i % 3 == 0 ? static_cast<int>(i % nc) : bucket(mean_of(rgb.back()), nc));
  }
  const auto data = write_dataset(
      dir.path(), 200, [&](std::size_t i) { return rgb[i]; },
      [](std::size_t i) { return random_image(8, 8, {"NIR"}, 5000 + i); }, labels, nc);
  const auto plan = make_counterfactual_plan(data, std::nullopt, ShuffleChannel::nir, 10, 0);
  const auto preds = run_probe_evaluation(probe(ProbeKind::rgb_mean_bucket, nc), data, &plan,
                                          nullptr, {});
  const auto scores = score_predictions(data, plan, preds, AccuracyFunction::for_manifest(data));
  const double secs = seconds_since(t0);
  if (scores.size() != 1) return {false, "expected one model"};
  const auto& s = scores[0];
  const bool ok = std::abs(s.ps_model) <= 1e-12 && std::abs(s.ps_task) <= 1e-12 && secs < 5.0;
  return {ok, fmt("ps_model=%.3g ps_task=%.3g runtime=%.2fs", s.ps_model, s.ps_task, secs)};
}

// --- 2 ------------------------------------------------------------------------
Outcome exhaustive_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  TempDir dir("acc2");
  const int nc = 3;
  const std::vector<Sample> levels = {20, 60, 110, 150, 200, 240};
  std::vector<int> labels;
  for (Sample v : levels) labels.push_back(bucket(v, nc));
  const auto data = write_dataset(
      dir.path(), levels.size(), [](std::size_t) { return constant(4, 4, {"R", "G", "B"}, 90); },
      [&](std::size_t i) { return constant(4, 4, {"NIR"}, levels[i]); }, labels, nc);
  const auto fn = AccuracyFunction::for_manifest(data);
  const auto model = probe(ProbeKind::nir_mean_bucket, nc);

  // Oracle: enumerate all 720 bijections and count label agreements.
  std::vector<std::size_t> perm(levels.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> all;
  std::uint64_t hits = 0;
  do {
    all.push_back(perm);
    for (std::size_t i = 0; i < perm.size(); ++i) hits += labels[perm[i]] == labels[i];
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double exhaustive =
      1.0 - static_cast<double>(hits) / static_cast<double>(all.size() * levels.size());

  auto ps_for = [&](const CounterfactualPlan& plan) {
    std::vector<PredictionManifest> m = {predict_clean(model, data, {})};
    for (auto& cf : predict_counterfactual(model, data, plan, {})) m.push_back(std::move(cf));
    return score_predictions(data, plan, m, fn).at(0).ps_model;
  };
  const auto sampled = make_counterfactual_plan(data, std::nullopt, ShuffleChannel::nir, 10, 0);
  const double ps10 = ps_for(sampled);
  auto full = make_counterfactual_plan(data, std::nullopt, ShuffleChannel::nir, 0, 0);
  full.permutations = all;
  const double ps720 = ps_for(full);
  const double secs = seconds_since(t0);
  const bool ok = all.size() == 720 && std::abs(ps10 - exhaustive) <= 0.05 &&
                  std::abs(ps720 - exhaustive) <= 1e-12 && secs < 10.0;
  return {ok, fmt("exhaustive=%.6f K10=%.6f K720=%.6f", exhaustive, ps10, ps720) +
                  fmt(" runtime=%.2fs", secs)};
}

// --- 3 ------------------------------------------------------------------------
Outcome reliance_coupling() {
  const auto t0 = std::chrono::steady_clock::now();
  TempDir dir("acc3");
  const int nc = 8;
  const std::size_t n = 40;
  std::vector<MultiChannelImage> nir;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    nir.push_back(rename_channels(take_channel(photo_like(32, 32, 300 + i), i % 3), {"NIR"}));
    labels.push_back(bucket(mean_of(nir.back()), nc));
  }
  const auto data = write_dataset(
      dir.path() / "data", n, [](std::size_t i) { return photo_like(32, 32, 700 + i); },
      [&](std::size_t i) { return nir[i]; }, labels, nc);
  const auto fn = AccuracyFunction::for_manifest(data);
  const auto model = probe(ProbeKind::nir_mean_bucket, nc);
  const double clean = evaluate_manifest(data, predict_clean(model, data, {}), fn);

  std::vector<CorruptionSpec> rgb_specs;
  for (const auto& e : corruption_catalog()) {
    for (int s = 1; s <= kMaxSeverity; ++s) {
      rgb_specs.push_back({e.kind, s, CorruptionTarget::rgb, 1, {}});
    }
  }
  const auto rgb_run = corrupt_dataset(data, rgb_specs, dir.path() / "rgb");
  bool invariant = rgb_run.failures.empty() && rgb_run.variants.size() == rgb_specs.size() * n;
  for (const auto& v : rgb_run.variants) {
    const auto& item = *std::find_if(data.items.begin(), data.items.end(),
                                     [&](const ManifestItem& it) { return it.item_id == v.item_id; });
    invariant = invariant && read_file(v.nir_path) == read_file(data.resolve(item.nir_path));
  }
  double worst_rgb = 0.0;
  for (const auto& m : predict_corrupted(model, data, rgb_run.variants, {})) {
    worst_rgb = std::max(worst_rgb, std::abs(evaluate_manifest(data, m, fn) - clean));
  }

  const auto nir_run = corrupt_dataset(
      data, {{CorruptionKind::gaussian_noise, 5, CorruptionTarget::nir, 1, {}}},
      dir.path() / "nir");
  const auto nir_preds = predict_corrupted(model, data, nir_run.variants, {});
  const double noisy = nir_preds.size() == 1 ? evaluate_manifest(data, nir_preds[0], fn) : -1.0;
  const double drop = clean - noisy;
  const double secs = seconds_since(t0);
  const bool ok = invariant && worst_rgb == 0.0 && drop >= 0.10 && secs < 60.0;
  return {ok, fmt("rgb-only max |delta acc|=%.3g; nir gaussian s5 drop=%.3f", worst_rgb, drop) +
                  fmt(" (clean %.3f); runtime=%.1fs", clean, secs) +
                  (invariant ? "" : "; NIR bytes changed")};
}

// --- 4 ------------------------------------------------------------------------
Outcome severity_monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<MultiChannelImage> fixture;
  for (std::uint32_t i = 0; i < 16; ++i) fixture.push_back(photo_like(64, 64, 900 + i));
  std::vector<std::string> bad;
  double min_gap = 1e9;
  for (const auto& e : corruption_catalog()) {
    std::vector<double> mean_psnr;
    for (int s = 1; s <= kMaxSeverity; ++s) {
      double sum = 0;
      for (std::size_t i = 0; i < fixture.size(); ++i) {
        sum += psnr(fixture[i], apply_corruption(fixture[i], e.kind, s, 31 + i));
      }
      mean_psnr.push_back(sum / static_cast<double>(fixture.size()));
    }
    for (int s = 1; s < kMaxSeverity; ++s) {
      min_gap = std::min(min_gap, mean_psnr[s - 1] - mean_psnr[s]);
      if (!(mean_psnr[s] < mean_psnr[s - 1])) {
        bad.push_back(to_string(e.kind) + fmt("@s%.0f(%.2f>=%.2f)", s + 1, mean_psnr[s],
                                              mean_psnr[s - 1]));
      }
    }
  }
  const double secs = seconds_since(t0);
  std::string detail = fmt("15 kinds, smallest step %.3f dB, runtime=%.1fs", min_gap, secs);
  for (const auto& b : bad) detail += "; " + b;
  return {bad.empty() && secs < 120.0, detail};
}

// --- 5 ------------------------------------------------------------------------
Outcome shared_vs_independent() {
  // Mid-tone content: saturated pixels clip to 0 or 255 under any draw and
  // would tie regardless of how the randomness is shared.
  const auto base = photo_like(64, 64, 55);
  const auto rgb = make_image(64, 64, {"R", "G", "B"}, [&](std::size_t c, std::size_t x, std::size_t y) {
    return static_cast<Sample>(80 + base.at(c, x, y) * 96 / 256);
  });
  const auto nir = rename_channels(take_channel(rgb, 0), {"NIR"});
  CorruptionSpec spec;
  spec.target = CorruptionTarget::both;
  spec.seed = 2024;
  spec.kind = CorruptionKind::motion_blur;
  spec.severity = 3;
  const auto shared = corrupt_multispectral(rgb, nir, spec);
  const bool identical = shared.nir.planes()[0] == shared.rgb.planes()[0];

  spec.kind = CorruptionKind::gaussian_noise;
  const auto indep = corrupt_multispectral(rgb, nir, spec);
  std::size_t differ = 0;
  const auto& a = indep.nir.planes()[0];
  const auto& b = indep.rgb.planes()[0];
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i] != b[i];
  const double frac = static_cast<double>(differ) / static_cast<double>(a.size());
  return {identical && frac >= 0.99,
          std::string("motion_blur shared ") + (identical ? "identical" : "DIFFERENT") +
              fmt("; gaussian_noise s3 unequal fraction %.4f", frac)};
}

// --- 6 ------------------------------------------------------------------------
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return out;
}

Outcome determinism() {
  TempDir dir("acc6");
  std::vector<int> labels = {0, 1, 0, 1};
  write_dataset(
      dir.path() / "data", 4, [](std::size_t i) { return photo_like(40, 36, 80 + i); },
      [](std::size_t i) { return rename_channels(take_channel(photo_like(40, 36, 90 + i), 2), {"NIR"}); },
      labels, 2);
  const std::string manifest = (dir.path() / "data" / "manifest.json").string();
  auto corrupt = [&](const std::string& out, const std::string& threads) {
    std::ostringstream o, e;
    return run_cli({"--seed", "11", "corrupt", "--manifest", manifest, "--out", out, "--kinds",
                    "all", "--severities", "1..5", "--target", "all", "--threads", threads},
                   o, e);
  };
  const int c1 = corrupt((dir.path() / "a").string(), "1");
  const int c2 = corrupt((dir.path() / "b").string(), "1");
  const int c3 = corrupt((dir.path() / "c").string(), "8");
  if (c1 || c2 || c3) return {false, "corrupt command failed"};
  const auto a = tree_bytes(dir.path() / "a");
  const bool same_seed = a == tree_bytes(dir.path() / "b");
  const bool threads = a == tree_bytes(dir.path() / "c");
  return {same_seed && threads, fmt("%.0f files", static_cast<double>(a.size())) +
                                    "; rerun " + (same_seed ? "identical" : "DIFFERS") +
                                    "; 1 vs 8 threads " + (threads ? "identical" : "DIFFER")};
}

// --- 7 ------------------------------------------------------------------------
Outcome metric_oracles() {
  const int nc = 4;
  std::mt19937 gen(77);
  std::uniform_int_distribution<int> cls(0, nc - 1);
  IouAccumulator pooled(nc);
  std::vector<std::uint64_t> inter(nc, 0), uni(nc, 0);
  LabelMap preds, labels;
  std::vector<std::vector<std::uint64_t>> cm(nc, std::vector<std::uint64_t>(nc, 0));
  std::uint64_t correct = 0, total = 0;
  bool per_pair_ok = true;
  for (int k = 0; k < 100; ++k) {
    Plane p(64), l(64);
    for (std::size_t i = 0; i < 64; ++i) {
      p[i] = static_cast<Sample>(cls(gen));
      l[i] = static_cast<Sample>(cls(gen));
    }
    pooled.add(p, l);
    // Brute force: per class set sizes.
    std::vector<double> pair_iou;
    for (int c = 0; c < nc; ++c) {
      std::uint64_t in = 0, un = 0;
      for (std::size_t i = 0; i < 64; ++i) {
        in += p[i] == c && l[i] == c;
        un += p[i] == c || l[i] == c;
      }
      inter[c] += in;
      uni[c] += un;
      if (un) pair_iou.push_back(static_cast<double>(in) / static_cast<double>(un));
    }
    const auto single = iou(std::span<const Sample>(p), std::span<const Sample>(l), nc);
    double brute_mean = 0;
    for (double v : pair_iou) brute_mean += v;
    brute_mean /= static_cast<double>(pair_iou.size());
    per_pair_ok = per_pair_ok && single.mean && std::abs(*single.mean - brute_mean) <= 1e-15;
    for (std::size_t i = 0; i < 64; ++i) {
      const std::string id = std::to_string(k) + "_" + std::to_string(i);
      preds[id] = p[i];
      labels[id] = l[i];
      ++cm[l[i]][p[i]];
      correct += p[i] == l[i];
      ++total;
    }
  }
  bool pooled_ok = pooled.intersections() == inter && pooled.unions() == uni;
  double brute_pooled = 0;
  for (int c = 0; c < nc; ++c) brute_pooled += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
  brute_pooled /= nc;
  const auto pooled_mean = pooled.result().mean;
  pooled_ok = pooled_ok && pooled_mean && *pooled_mean == brute_pooled;

  const auto matrix = confusion_matrix(preds, labels, nc);
  const bool cm_ok = matrix == cm;
  const double acc = zero_one_accuracy(preds, labels);
  const bool acc_ok = acc == static_cast<double>(correct) / static_cast<double>(total);
  std::uint64_t trace = 0, sum = 0;
  for (int i = 0; i < nc; ++i) {
    trace += matrix[i][i];
    for (int j = 0; j < nc; ++j) sum += matrix[i][j];
  }
  const bool trace_ok = static_cast<double>(trace) / static_cast<double>(sum) == acc;
  const bool ok = per_pair_ok && pooled_ok && cm_ok && acc_ok && trace_ok;
  return {ok, fmt("pooled mIoU=%.6f accuracy=%.6f", pooled_mean.value_or(-1), acc) +
                  (per_pair_ok ? "" : "; per-pair IoU mismatch") +
                  (pooled_ok ? "" : "; pooled mismatch") + (cm_ok ? "" : "; confusion mismatch") +
                  (acc_ok ? "" : "; accuracy mismatch") + (trace_ok ? "" : "; trace mismatch")};
}

// --- 8 ------------------------------------------------------------------------
Outcome preprocessing() {
  const std::size_t w = 64, h = 48;
  const auto ramp = make_image(
      w, h, {"R", "G", "B", "NIR"},
      [&](std::size_t c, std::size_t x, std::size_t y) {
        const double t = static_cast<double>(y * w + x) / static_cast<double>(w * h - 1);
        return static_cast<Sample>(std::lround(1000.0 * c + t * (60000.0 - 5000.0 * c)));
      },
      16);
  const auto out = preprocess_scene(ramp, std::nullopt, RadiometricConfig{}, {});
  bool range_ok = true;
  for (const auto& p : out.image.planes()) {
    range_ok = range_ok && *std::min_element(p.begin(), p.end()) == 0 &&
               *std::max_element(p.begin(), p.end()) == 255;
  }
  const MultiChannelImage ends(2, 1, 8, {"L"}, {Plane{0, 255}});
  const auto g = gamma_correct(ends, 2.2);
  const bool gamma_ok = g.at(0, 0, 0) == 0 && g.at(0, 1, 0) == 255;
  const MultiChannelImage mid(1, 1, 16, {"L"}, {Plane{32768}});
  const Sample r = rescale_16_to_8(mid).at(0, 0, 0);
  const bool ok = range_ok && gamma_ok && r == 128 && out.degenerate_channels.empty();
  return {ok, std::string("per-channel [0,255] ") + (range_ok ? "ok" : "VIOLATED") +
                  "; gamma fixed points " + (gamma_ok ? "ok" : "VIOLATED") +
                  fmt("; rescale(32768)=%.0f", r)};
}

// --- 9 ------------------------------------------------------------------------
Outcome tiling_and_splits() {
  const auto big = random_image(4096, 3072, {"L"}, 4242);
  const auto tiles = tile_scene(big, 1024);
  std::vector<Plane> canvas(1, Plane(big.pixel_count(), 0));
  for (const auto& t : tiles) paste(canvas, big.width(), t.image, t.rect.x, t.rect.y);
  const bool tiles_ok = tiles.size() == 12 && canvas == big.planes();

  std::vector<SceneRecord> uniform;
  for (int i = 0; i < 10; ++i) {
    SceneRecord s;
    s.scene_id = "u" + std::to_string(i);
    s.metadata.location = "X";
    uniform.push_back(s);
  }
  SplitOptions opts;
  opts.fractions = {0.74, 0.13, 0.13};
  std::array<std::size_t, 3> sizes{};
  for (const auto& [id, s] : assign_splits(uniform, opts).assignment) {
    ++sizes[static_cast<std::size_t>(s)];
  }
  const bool sizes_ok = sizes == std::array<std::size_t, 3>{8, 1, 1};

  // Varied metadata; three items per scene must always share a split.
  std::vector<SceneRecord> scenes;
  std::vector<ManifestItem> items;
  const char* locs[] = {"north", "south", "east", "west"};
  for (int i = 0; i < 20; ++i) {
    SceneRecord s;
    s.scene_id = "scene" + std::to_string(i);
    s.metadata.location = locs[(i * 7) % 4];
    s.metadata.view_angle = (i * 13) % 40;
    s.metadata.azimuth = (i * 71) % 360;
    s.item_count = 1 + i % 4;
    scenes.push_back(s);
    for (int j = 0; j < 3; ++j) {
      ManifestItem it;
      it.item_id = s.scene_id + "_" + std::to_string(j);
      it.scene_id = s.scene_id;
      it.label = 0;
      it.rgb_path = it.item_id + ".png";
      it.nir_path = it.item_id + "_nir.png";
      items.push_back(it);
    }
  }
  opts.fractions = {0.7, 0.1, 0.2};
  opts.weight_by = WeightBy::item_count;
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    opts.seed = seed;
    const auto a = assign_splits(scenes, opts);
    if (a.assignment.size() != scenes.size()) ++violations;
    const auto m = write_manifest(items, a, Task::classification, {"x"}, {}, {});
    std::map<std::string, std::set<Split>> seen;
    for (const auto& it : m.items) seen[it.scene_id].insert(*it.split);
    for (const auto& [id, s] : seen) violations += s.size() != 1;
  }
  const bool ok = tiles_ok && sizes_ok && violations == 0;
  return {ok, fmt("tiles=%.0f", static_cast<double>(tiles.size())) +
                  (tiles_ok ? " reassembly exact" : " reassembly FAILED") +
                  fmt("; sizes=(%.0f,%.0f,%.0f)", sizes[0], sizes[1], sizes[2]) +
                  fmt("; split violations over 1000 seeds=%.0f", static_cast<double>(violations))};
}

// --- 10 -----------------------------------------------------------------------
Outcome plan_reproducibility() {
  // Frozen from tests/oracles/prng_oracle.py.
  const std::vector<std::vector<std::size_t>> golden = {{3, 0, 2, 1}, {3, 2, 1, 0}};
  const bool golden_ok =
      make_counterfactual_plan(4, ShuffleChannel::nir, 2, 7).permutations == golden;
  const auto plan = make_counterfactual_plan(3, ShuffleChannel::nir, 10000, 12345);
  std::map<std::vector<std::size_t>, std::size_t> freq;
  for (const auto& p : plan.permutations) ++freq[p];
  double worst = 0.0;
  for (const auto& [p, c] : freq) {
    worst = std::max(worst, std::abs(static_cast<double>(c) / 10000.0 - 1.0 / 6.0));
  }
  const bool ok = golden_ok && freq.size() == 6 && worst <= 0.02;
  return {ok, std::string("golden ") + (golden_ok ? "matches" : "DIFFERS") +
                  fmt("; n=3 distinct=%.0f max |freq-1/6|=%.4f", static_cast<double>(freq.size()),
                      worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"channel-blind probe scores zero", channel_blindness},
      {"sampled and exhaustive perceptual scores agree", exhaustive_oracle},
      {"ignored-channel corruption is inert, used-channel noise hurts", reliance_coupling},
      {"PSNR decreases with severity for every kind", severity_monotonicity},
      {"shared vs independent corruption randomness", shared_vs_independent},
      {"corrupt output is deterministic across reruns and threads", determinism},
      {"IoU, confusion and accuracy match brute force", metric_oracles},
      {"preprocessing range and fixed points", preprocessing},
      {"tiling and scene-level splits", tiling_and_splits},
      {"counterfactual plan golden and uniformity", plan_reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
