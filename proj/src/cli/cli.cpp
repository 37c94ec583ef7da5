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

#include "specband/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <toml.hpp>

#include "specband/corruptions.hpp"
#include "specband/dataset.hpp"
#include "specband/error.hpp"
#include "specband/metrics.hpp"
#include "specband/parallel.hpp"
#include "specband/png_io.hpp"
#include "specband/probes.hpp"
#include "specband/radiometric.hpp"
#include "specband/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {
namespace {

const std::vector<std::string> kSplitChoices = {"train", "val", "test", "all"};

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::optional<Split> split_arg(const std::string& text) {
  if (text.empty() || text == "all") return std::nullopt;
  return parse_split(text);
}

std::vector<int> parse_severities(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      for (const auto& part : split_list(text)) out.push_back(std::stoi(part));
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("bad severity list '" + text + "'");
  }
  if (out.empty()) throw InvalidArgument("empty severity list");
  for (int s : out) {
    if (s < 1 || s > kMaxSeverity) throw InvalidArgument("severities must lie in 1..5");
  }
  return out;
}

std::vector<CorruptionKind> parse_kinds(const std::string& text) {
  std::vector<CorruptionKind> out;
  if (text == "all") {
    for (const auto& e : corruption_catalog()) out.push_back(e.kind);
    return out;
  }
  for (const auto& name : split_list(text)) out.push_back(parse_corruption_kind(name));
  if (out.empty()) throw InvalidArgument("empty corruption kind list");
  return out;
}

std::vector<CorruptionTarget> parse_targets(const std::string& text) {
  if (text == "all") return {CorruptionTarget::rgb, CorruptionTarget::nir, CorruptionTarget::both};
  std::vector<CorruptionTarget> out;
  for (const auto& name : split_list(text)) out.push_back(parse_corruption_target(name));
  return out;
}

// Label names from a comma list, the config, or 0..max_id.
std::vector<std::string> label_names(const std::string& flag, const json& config, int max_id) {
  if (!flag.empty()) return split_list(flag);
  if (config.contains("labels")) return config["labels"].get<std::vector<std::string>>();
  std::vector<std::string> out;
  for (int i = 0; i <= max_id; ++i) out.push_back(std::to_string(i));
  return out;
}

std::string safe_stem(const std::string& id) {
  std::string out;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    out += ok ? ch : '_';
  }
  return out;
}

json section(const json& config, const char* name) {
  return config.contains(name) ? config[name] : json::object();
}

template <typename T>
T config_value(const json& config, const char* sec, const char* key, T fallback) {
  const json s = section(config, sec);
  return s.contains(key) ? s[key].get<T>() : fallback;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  json config = json::object();
  std::uint64_t seed = 0;

  std::string hash() const {
    json c = config;
    c["seed"] = seed;
    return config_hash(c);
  }
};

// --- subcommand bodies -------------------------------------------------------

struct PreprocessArgs {
  std::string input, pan, output, rgb_out, nir_out, rgb = "R,G,B", nir = "NIR";
};

void cmd_preprocess(Context& ctx, const PreprocessArgs& a) {
  auto cfg = RadiometricConfig::from_json(section(ctx.config, "radiometric"));
  const auto ms = load_raster(a.input);
  std::optional<MultiChannelImage> pan;
  if (!a.pan.empty()) {
    pan = load_raster(a.pan);
    cfg.pansharpen = true;
  }
  std::vector<ChannelGroup> groups;
  if (!a.rgb_out.empty()) groups.push_back({"rgb", split_list(a.rgb)});
  if (!a.nir_out.empty()) groups.push_back({"nir", split_list(a.nir)});
  const auto result = preprocess_scene(ms, pan, cfg, groups);
  save_raster(result.image, a.output);
  std::size_t g = 0;
  if (!a.rgb_out.empty()) save_raster(result.groups[g++], a.rgb_out);
  if (!a.nir_out.empty()) save_raster(result.groups[g++], a.nir_out);
  for (const auto& name : result.degenerate_channels) {
    ctx.err << "warning: channel " << name << " has a degenerate stretch and was zeroed\n";
  }
  ctx.out << "wrote " << a.output << "\n";
}

struct DatasetArgs {
  std::string scenes, splits, out, labels, rgb = "R,G,B", nir = "NIR", exclude;
  double pad = -1.0;
  long min_class_count = -1;
  long tile = -1;
};

std::optional<SplitAssignment> maybe_splits(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return SplitAssignment::load(path);
}

DatasetManifest finish_manifest(std::vector<ManifestItem> items,
                                const std::optional<SplitAssignment>& splits, Task task,
                                std::vector<std::string> labels, std::vector<int> excluded,
                                const fs::path& out_path) {
  if (splits) {
    return write_manifest(std::move(items), *splits, task, std::move(labels),
                          std::move(excluded), out_path);
  }
  DatasetManifest m;
  m.task = task;
  m.label_set = std::move(labels);
  m.excluded_class_ids = std::move(excluded);
  m.items = std::move(items);
  m.validate();
  m.save(out_path);
  return m;
}

void cmd_chip(Context& ctx, const DatasetArgs& a) {
  const double pad = a.pad >= 0.0 ? a.pad : config_value(ctx.config, "chip", "pad", 0.0);
  const auto min_count = static_cast<std::size_t>(
      a.min_class_count >= 0
          ? a.min_class_count
          : config_value<long>(ctx.config, "chip", "min_class_count",
                               static_cast<long>(kDefaultMinClassCount)));
  const auto scenes = load_scenes(a.scenes);
  const auto splits = maybe_splits(a.splits);
  const fs::path out(a.out);
  const ChannelGroup rgb{"rgb", split_list(a.rgb)};
  const ChannelGroup nir{"nir", split_list(a.nir)};

  std::vector<std::vector<ManifestItem>> per_scene(scenes.size());
  parallel_for(scenes.size(), resolve_thread_count(0), [&](std::size_t s) {
    const auto& scene = scenes[s];
    const auto image = load_raster(scene.image_path);
    const auto chips = chip_scene(image, scene.annotations, pad);
    for (std::size_t k = 0; k < chips.size(); ++k) {
      ManifestItem item;
      item.item_id = scene.scene_id + "_" + std::to_string(k);
      const std::string stem = safe_stem(item.item_id);
      item.rgb_path = fs::path("chips") / (stem + "_rgb.png");
      item.nir_path = fs::path("chips") / (stem + "_nir.png");
      save_raster(extract_group(chips[k].image, rgb), out / item.rgb_path);
      save_raster(extract_group(chips[k].image, nir), out / item.nir_path);
      item.label = chips[k].label;
      item.scene_id = scene.scene_id;
      per_scene[s].push_back(std::move(item));
    }
  });

  std::vector<ManifestItem> items;
  for (auto& v : per_scene) {
    for (auto& item : v) items.push_back(std::move(item));
  }
  // Rare classes are judged on training chips when splits are known.
  std::vector<int> counted;
  int max_id = 0;
  for (const auto& item : items) {
    max_id = std::max(max_id, *item.label);
    if (!splits || splits->of(item.scene_id) == Split::train) counted.push_back(*item.label);
  }
  const auto rare = rare_classes(counted, min_count);
  std::size_t dropped = 0;
  std::erase_if(items, [&](const ManifestItem& item) {
    const bool drop = rare.count(*item.label) > 0 ||
                      (splits && !counted.empty() &&
                       std::find(counted.begin(), counted.end(), *item.label) == counted.end());
    dropped += drop;
    return drop;
  });
  const auto m = finish_manifest(std::move(items), splits, Task::classification,
                                 label_names(a.labels, ctx.config, max_id), {},
                                 out / "manifest.json");
  ctx.out << "wrote " << m.items.size() << " chips (" << dropped << " dropped as rare) to "
          << (out / "manifest.json").string() << "\n";
}

void cmd_tile(Context& ctx, const DatasetArgs& a) {
  const auto size = static_cast<std::size_t>(
      a.tile > 0 ? a.tile : config_value<long>(ctx.config, "tile", "size", 1024));
  const auto scenes = load_scenes(a.scenes);
  const auto splits = maybe_splits(a.splits);
  const fs::path out(a.out);
  const ChannelGroup rgb{"rgb", split_list(a.rgb)};
  const ChannelGroup nir{"nir", split_list(a.nir)};

  std::vector<std::vector<ManifestItem>> per_scene(scenes.size());
  std::vector<int> max_label(scenes.size(), 0);
  parallel_for(scenes.size(), resolve_thread_count(0), [&](std::size_t s) {
    const auto& scene = scenes[s];
    if (scene.mask_path.empty()) {
      throw InvalidArgument("scene '" + scene.scene_id + "' has no mask");
    }
    const auto image = load_raster(scene.image_path);
    const auto mask = load_raster(scene.mask_path);
    for (const auto& t : tile_scene(image, size, mask)) {
      ManifestItem item;
      item.item_id = scene.scene_id + "_r" + std::to_string(t.row) + "_c" + std::to_string(t.col);
      const std::string stem = safe_stem(item.item_id);
      item.rgb_path = fs::path("tiles") / (stem + "_rgb.png");
      item.nir_path = fs::path("tiles") / (stem + "_nir.png");
      item.mask_path = fs::path("masks") / (stem + ".png");
      save_raster(extract_group(t.image, rgb), out / item.rgb_path);
      save_raster(extract_group(t.image, nir), out / item.nir_path);
      save_raster(*t.mask, out / item.mask_path);
      for (Sample v : t.mask->plane(0)) max_label[s] = std::max<int>(max_label[s], v);
      item.scene_id = scene.scene_id;
      per_scene[s].push_back(std::move(item));
    }
  });
  std::vector<ManifestItem> items;
  for (auto& v : per_scene) {
    for (auto& item : v) items.push_back(std::move(item));
  }
  std::vector<int> excluded;
  for (const auto& e : split_list(a.exclude)) excluded.push_back(std::stoi(e));
  if (excluded.empty() && ctx.config.contains("excluded_class_ids")) {
    excluded = ctx.config["excluded_class_ids"].get<std::vector<int>>();
  }
  const int max_id = max_label.empty() ? 0 : *std::max_element(max_label.begin(), max_label.end());
  const auto m = finish_manifest(std::move(items), splits, Task::segmentation,
                                 label_names(a.labels, ctx.config, max_id), excluded,
                                 out / "manifest.json");
  ctx.out << "wrote " << m.items.size() << " tiles to " << (out / "manifest.json").string()
          << "\n";
}

struct SplitArgs {
  std::string scenes, out, fractions, weight_by;
  double lambda = -1.0;
};

void cmd_split(Context& ctx, const SplitArgs& a) {
  SplitOptions opt;
  const json sec = section(ctx.config, "split");
  if (sec.contains("fractions")) opt.fractions = sec["fractions"].get<std::array<double, 3>>();
  if (!a.fractions.empty()) {
    const auto parts = split_list(a.fractions);
    if (parts.size() != 3) throw InvalidArgument("--fractions needs three values");
    for (std::size_t i = 0; i < 3; ++i) opt.fractions[i] = std::stod(parts[i]);
  }
  // Fractions are rescaled to sum to one.
  const double sum = opt.fractions[0] + opt.fractions[1] + opt.fractions[2];
  if (!(sum > 0.0)) throw InvalidArgument("split fractions must be positive");
  for (double& f : opt.fractions) f /= sum;
  opt.weight_by = parse_weight_by(!a.weight_by.empty() ? a.weight_by
                                                       : sec.value("weight_by", std::string("scene_count")));
  opt.lambda = a.lambda >= 0.0 ? a.lambda : sec.value("lambda", 1.0);
  opt.view_angle_bin = sec.value("view_angle_bin", opt.view_angle_bin);
  opt.azimuth_bin = sec.value("azimuth_bin", opt.azimuth_bin);
  opt.sun_elevation_bin = sec.value("sun_elevation_bin", opt.sun_elevation_bin);
  opt.seed = ctx.seed;
  const auto result = assign_splits(load_scenes(a.scenes), opt);
  result.save(a.out);
  std::array<std::size_t, 3> counts{};
  for (const auto& [id, s] : result.assignment) ++counts[static_cast<std::size_t>(s)];
  ctx.out << "train " << counts[0] << ", val " << counts[1] << ", test " << counts[2]
          << " scenes; objective " << result.objective << "\n";
}

void cmd_stats(Context& ctx, const std::string& manifest, const std::string& split,
               const std::string& out) {
  const auto stats = compute_channel_stats(DatasetManifest::load(manifest), split_arg(split));
  const std::string text = stats.to_json().dump(2) + "\n";
  if (out.empty()) {
    ctx.out << text;
  } else {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + out + "'");
    f << text;
  }
}

struct CorruptArgs {
  std::string manifest, out, kinds = "all", severities = "1..5", target = "both", split;
  std::size_t threads = 0;
  std::size_t replicates = 1;
};

int cmd_corrupt(Context& ctx, const CorruptArgs& a) {
  const auto manifest = DatasetManifest::load(a.manifest);
  const auto table = SeverityTable::from_json(
      ctx.config.contains("severity_table") ? ctx.config["severity_table"] : json());
  std::vector<CorruptionSpec> specs;
  for (std::size_t r = 0; r < a.replicates; ++r) {
    for (auto kind : parse_kinds(a.kinds)) {
      for (int sev : parse_severities(a.severities)) {
        for (auto target : parse_targets(a.target)) {
          CorruptionSpec spec;
          spec.kind = kind;
          spec.severity = sev;
          spec.target = target;
          spec.seed = ctx.seed + r;
          specs.push_back(spec);
        }
      }
    }
  }
  CorruptDatasetOptions opt;
  opt.threads = resolve_thread_count(a.threads);
  opt.split = split_arg(a.split);
  const auto result = corrupt_dataset(manifest, specs, a.out, table, opt);
  for (const auto& f : result.failures) ctx.err << "error: " << f << "\n";
  ctx.out << "wrote " << result.variants.size() << " variant records to "
          << (fs::path(a.out) / kVariantManifestName).string() << "\n";
  return result.failures.empty() ? kExitOk : kExitDataError;
}

struct PlanArgs {
  std::string manifest, out, channel = "nir", split;
  std::size_t n = 0;
  long k = -1;
};

void cmd_plan(Context& ctx, const PlanArgs& a) {
  const auto k = static_cast<std::size_t>(
      a.k >= 0 ? a.k
               : config_value<long>(ctx.config, "plan", "k", static_cast<long>(kDefaultPermutations)));
  const auto channel = parse_shuffle_channel(a.channel);
  CounterfactualPlan plan;
  json extra = json::object();
  if (!a.manifest.empty()) {
    plan = make_counterfactual_plan(DatasetManifest::load(a.manifest), split_arg(a.split), channel,
                                    k, ctx.seed);
    extra["manifest"] = fs::absolute(a.manifest).lexically_normal().generic_string();
  } else {
    if (a.n == 0) throw InvalidArgument("plan-counterfactual needs --manifest or --n");
    plan = make_counterfactual_plan(a.n, channel, k, ctx.seed);
  }
  json doc = plan.to_json();
  doc.update(extra);
  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + a.out + "'");
  f << doc.dump(2) << "\n";
  ctx.out << "wrote plan with " << plan.permutations.size() << " permutations of "
          << plan.n_items << " items to " << a.out << "\n";
}

struct ProbeArgs {
  std::string manifest, probe = "nir_mean_bucket", name, plan, variants, out, seed_id = "0", split;
  int num_classes = 0;
  double alpha = 0.5;
  double threshold = 128.0;
  std::size_t threads = 0;
};

void cmd_probe_eval(Context& ctx, const ProbeArgs& a) {
  const auto dataset = DatasetManifest::load(a.manifest);
  ProbeModel model;
  model.kind = parse_probe_kind(a.probe);
  model.num_classes =
      a.num_classes > 0 ? a.num_classes : std::max(2, static_cast<int>(dataset.label_set.size()));
  model.alpha = a.alpha;
  model.threshold = a.threshold;
  model.name = a.name;
  model.validate();
  ProbeRunOptions opt;
  opt.seed_id = a.seed_id;
  opt.split = split_arg(a.split);
  opt.threads = resolve_thread_count(a.threads);
  opt.out_root = a.out;
  std::optional<CounterfactualPlan> plan;
  if (!a.plan.empty()) plan = CounterfactualPlan::load(a.plan);
  std::optional<std::vector<VariantRecord>> variants;
  if (!a.variants.empty()) variants = load_variant_records(a.variants);
  const auto manifests = run_probe_evaluation(model, dataset, plan ? &*plan : nullptr,
                                              variants ? &*variants : nullptr, opt);
  ctx.out << "wrote " << manifests.size() << " prediction manifests for " << model.model_id()
          << " under " << a.out << "\n";
}

std::string manifest_from_plan(const std::string& flag, const std::string& plan_path) {
  if (!flag.empty()) return flag;
  std::ifstream in(plan_path);
  if (!in) throw IoError("cannot open plan '" + plan_path + "'");
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_object() && doc.contains("manifest")) return doc["manifest"].get<std::string>();
  throw InvalidArgument("no --manifest given and the plan does not name one");
}

AccuracyFunction accuracy_for(const DatasetManifest& dataset, const std::string& aggregation) {
  auto acc = AccuracyFunction::for_manifest(dataset);
  if (aggregation == "per_item") acc.aggregation = IouAggregation::per_item;
  return acc;
}

void cmd_score(Context& ctx, const std::string& plan_path, const std::string& preds,
               const std::string& manifest_flag, const std::string& out,
               const std::string& aggregation) {
  const auto plan = CounterfactualPlan::load(plan_path);
  const auto dataset = DatasetManifest::load(manifest_from_plan(manifest_flag, plan_path));
  const auto scores = score_predictions(dataset, plan, load_prediction_dir(preds),
                                        accuracy_for(dataset, aggregation));
  auto table = perceptual_score_table(scores);
  table.metadata["config_hash"] = ctx.hash();
  table.metadata["plan_seed"] = std::to_string(plan.seed);
  const auto path = write_report_tables(table, out.empty() ? preds : out);
  ctx.out << "wrote " << path.string() << "\n";
}

void cmd_robustness(Context& ctx, const std::string& manifest, const std::string& preds,
                    const std::string& split, const std::string& out,
                    const std::string& aggregation, const std::string& plot) {
  const auto dataset = DatasetManifest::load(manifest);
  const auto records = robustness_records(dataset, load_prediction_dir(preds),
                                          accuracy_for(dataset, aggregation), split_arg(split));
  auto table = robustness_table(robustness_curves(records));
  table.metadata["config_hash"] = ctx.hash();
  const auto path = write_report_tables(table, out.empty() ? preds : out);
  ctx.out << "wrote " << path.string() << "\n";
  if (!plot.empty()) {
    render_plot(table, PlotStyle::severity_lines, plot);
    ctx.out << "wrote " << plot << "\n";
  }
}

void cmd_report(Context& ctx, const std::string& input, const std::string& style,
                const std::string& out) {
  render_plot(ReportTable::load(input), parse_plot_style(style), out);
  ctx.out << "wrote " << out << "\n";
}

}  // namespace

json load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".toml") {
    try {
      const toml::table tbl = toml::parse(ss.str(), path.string());
      std::stringstream js;
      js << toml::json_formatter{tbl};
      return json::parse(js.str());
    } catch (const toml::parse_error& e) {
      throw FormatError("config '" + path.string() + "': " + std::string(e.description()));
    }
  }
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw FormatError("config '" + path.string() + "': " + e.what());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robustness evaluation toolkit for RGB+NIR imagery", "specband"};
  app.fallthrough();
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON or TOML configuration file")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Base random seed (default: config `seed`, else 0)");

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "16-bit multispectral scene to 8-bit");
  c_pre->add_option("--input", pre.input, "Multispectral raster")->required();
  c_pre->add_option("--pan", pre.pan, "Panchromatic raster; enables pansharpening");
  c_pre->add_option("--output", pre.output, "Output raster")->required();
  c_pre->add_option("--rgb-out", pre.rgb_out, "Also write the RGB group here");
  c_pre->add_option("--nir-out", pre.nir_out, "Also write the NIR group here");
  c_pre->add_option("--rgb", pre.rgb, "RGB channel names")->capture_default_str();
  c_pre->add_option("--nir", pre.nir, "NIR channel names")->capture_default_str();

  DatasetArgs chip;
  auto* c_chip = app.add_subcommand("chip", "Cut object chips from annotated scenes");
  c_chip->add_option("--scenes", chip.scenes, "Scene records (JSON)")->required();
  c_chip->add_option("--splits", chip.splits, "Split assignment from `split`");
  c_chip->add_option("--out", chip.out, "Output directory")->required();
  c_chip->add_option("--pad", chip.pad, "Padding as a fraction of the box size");
  c_chip->add_option("--min-class-count", chip.min_class_count, "Drop rarer classes");
  c_chip->add_option("--labels", chip.labels, "Comma-separated class names");
  c_chip->add_option("--rgb", chip.rgb, "RGB channel names")->capture_default_str();
  c_chip->add_option("--nir", chip.nir, "NIR channel names")->capture_default_str();

  DatasetArgs tile;
  auto* c_tile = app.add_subcommand("tile", "Cut scenes and masks into square tiles");
  c_tile->add_option("--scenes", tile.scenes, "Scene records (JSON)")->required();
  c_tile->add_option("--splits", tile.splits, "Split assignment from `split`");
  c_tile->add_option("--out", tile.out, "Output directory")->required();
  c_tile->add_option("--tile", tile.tile, "Tile side in pixels (default 1024)");
  c_tile->add_option("--labels", tile.labels, "Comma-separated class names");
  c_tile->add_option("--exclude", tile.exclude, "Class ids left out of averages");
  c_tile->add_option("--rgb", tile.rgb, "RGB channel names")->capture_default_str();
  c_tile->add_option("--nir", tile.nir, "NIR channel names")->capture_default_str();

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Assign scenes to train/val/test");
  c_split->add_option("--scenes", split.scenes, "Scene records (JSON)")->required();
  c_split->add_option("--out", split.out, "Output JSON")->required();
  c_split->add_option("--fractions", split.fractions, "train,val,test (rescaled to sum 1)");
  c_split->add_option("--weight-by", split.weight_by, "scene_count or item_count")
      ->check(CLI::IsMember({"scene_count", "item_count"}));
  c_split->add_option("--lambda", split.lambda, "Weight of the metadata divergence term");

  std::string stats_manifest, stats_split, stats_out;
  auto* c_stats = app.add_subcommand("stats", "Per-channel mean and std");
  c_stats->add_option("--manifest", stats_manifest, "Dataset manifest")->required();
  c_stats->add_option("--split", stats_split, "Split (default train)")
      ->check(CLI::IsMember(kSplitChoices));
  c_stats->add_option("--out", stats_out, "Write JSON here instead of stdout");

  CorruptArgs cor;
  auto* c_cor = app.add_subcommand("corrupt", "Generate corrupted variants");
  c_cor->add_option("--manifest", cor.manifest, "Dataset manifest")->required();
  c_cor->add_option("--out", cor.out, "Output directory")->required();
  c_cor->add_option("--kinds", cor.kinds, "'all' or comma-separated kinds")->capture_default_str();
  c_cor->add_option("--severities", cor.severities, "e.g. 1..5 or 1,3")->capture_default_str();
  c_cor->add_option("--target", cor.target, "rgb, nir, both or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"rgb", "nir", "both", "all"}));
  c_cor->add_option("--split", cor.split, "Only items of this split")
      ->check(CLI::IsMember(kSplitChoices));
  c_cor->add_option("--threads", cor.threads, "Worker threads (0 = default)");
  c_cor->add_option("--replicates", cor.replicates, "Seed replicates seed..seed+n-1")
      ->check(CLI::PositiveNumber);

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan-counterfactual", "Channel-shuffle permutations");
  c_plan->add_option("--manifest", plan.manifest, "Dataset manifest");
  c_plan->add_option("--n", plan.n, "Item count when no manifest is given");
  c_plan->add_option("--channel", plan.channel, "Channel to shuffle")
      ->capture_default_str()
      ->check(CLI::IsMember({"rgb", "nir"}));
  c_plan->add_option("--k", plan.k, "Number of permutations (default 10)");
  c_plan->add_option("--split", plan.split, "Evaluated split (default all items)")
      ->check(CLI::IsMember(kSplitChoices));
  c_plan->add_option("--out", plan.out, "Output JSON")->required();

  ProbeArgs probe;
  auto* c_probe = app.add_subcommand("probe-eval", "Predictions of an analytic probe model");
  c_probe->add_option("--manifest", probe.manifest, "Dataset manifest")->required();
  c_probe->add_option("--probe", probe.probe, "Probe kind")
      ->capture_default_str()
      ->check(CLI::IsMember({"rgb_mean_bucket", "nir_mean_bucket", "blend"}));
  c_probe->add_option("--name", probe.name, "Model id (default: probe kind)");
  c_probe->add_option("--num-classes", probe.num_classes, "Buckets (default: label count)");
  c_probe->add_option("--alpha", probe.alpha, "NIR weight of the blend probe");
  c_probe->add_option("--threshold", probe.threshold, "Segmentation threshold");
  c_probe->add_option("--plan", probe.plan, "Counterfactual plan");
  c_probe->add_option("--variants", probe.variants, "Variant manifest from `corrupt`");
  c_probe->add_option("--out", probe.out, "Prediction root directory")->required();
  c_probe->add_option("--seed-id", probe.seed_id, "Replicate id")->capture_default_str();
  c_probe->add_option("--split", probe.split, "Split for clean predictions")
      ->check(CLI::IsMember(kSplitChoices));
  c_probe->add_option("--threads", probe.threads, "Worker threads (0 = default)");

  std::string sc_plan, sc_preds, sc_manifest, sc_out, sc_agg = "pooled";
  auto* c_score = app.add_subcommand("score", "Perceptual scores from prediction manifests");
  c_score->add_option("--plan", sc_plan, "Counterfactual plan")->required();
  c_score->add_option("--preds", sc_preds, "Prediction root directory")->required();
  c_score->add_option("--manifest", sc_manifest, "Dataset manifest (default: from the plan)");
  c_score->add_option("--out", sc_out, "Output directory (default: --preds)");
  c_score->add_option("--aggregation", sc_agg, "IoU aggregation")
      ->check(CLI::IsMember({"pooled", "per_item"}));

  std::string rb_manifest, rb_preds, rb_split, rb_out, rb_agg = "pooled", rb_plot;
  auto* c_rob = app.add_subcommand("robustness", "Accuracy-vs-severity curves");
  c_rob->add_option("--manifest", rb_manifest, "Dataset manifest")->required();
  c_rob->add_option("--preds", rb_preds, "Prediction root directory")->required();
  c_rob->add_option("--split", rb_split, "Evaluated split")->check(CLI::IsMember(kSplitChoices));
  c_rob->add_option("--out", rb_out, "Output directory (default: --preds)");
  c_rob->add_option("--aggregation", rb_agg, "IoU aggregation")
      ->check(CLI::IsMember({"pooled", "per_item"}));
  c_rob->add_option("--plot", rb_plot, "Also render an SVG here");

  std::string rp_input, rp_style, rp_out;
  auto* c_rep = app.add_subcommand("report", "Render a report CSV as SVG");
  c_rep->add_option("--input", rp_input, "Report CSV")->required()->check(CLI::ExistingFile);
  c_rep->add_option("--style", rp_style, "Plot style")
      ->required()
      ->check(CLI::IsMember({"ps_bars", "severity_lines"}));
  c_rep->add_option("--out", rp_out, "Output SVG")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Context ctx{out, err};
  ctx.seed = seed;
  try {
    if (!config_path.empty()) ctx.config = load_config(config_path);
    if (seed_opt->count() == 0 && ctx.config.contains("seed")) {
      ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    }
    if (*c_pre) cmd_preprocess(ctx, pre);
    if (*c_chip) cmd_chip(ctx, chip);
    if (*c_tile) cmd_tile(ctx, tile);
    if (*c_split) cmd_split(ctx, split);
    if (*c_stats) cmd_stats(ctx, stats_manifest, stats_split.empty() ? "train" : stats_split, stats_out);
    if (*c_cor) return cmd_corrupt(ctx, cor);
    if (*c_plan) cmd_plan(ctx, plan);
    if (*c_probe) cmd_probe_eval(ctx, probe);
    if (*c_score) cmd_score(ctx, sc_plan, sc_preds, sc_manifest, sc_out, sc_agg);
    if (*c_rob) cmd_robustness(ctx, rb_manifest, rb_preds, rb_split, rb_out, rb_agg, rb_plot);
    if (*c_rep) cmd_report(ctx, rp_input, rp_style, rp_out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace specband
