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

#include <fstream>
#include <optional>

#include "specband/corruptions.hpp"
#include "specband/error.hpp"
#include "specband/parallel.hpp"
#include "specband/png_io.hpp"
#include "specband/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {
namespace {

std::string file_stem_for(const std::string& item_id) {
  std::string out;
  for (char ch : item_id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    out += ok ? ch : '_';
  }
  return out;
}

fs::path variant_dir(const CorruptionSpec& spec) {
  return fs::path(to_string(spec.kind)) / ("s" + std::to_string(spec.severity)) /
         to_string(spec.target) / std::to_string(spec.seed);
}

}  // namespace

json VariantRecord::to_json() const {
  return {{"item_id", item_id},
          {"kind", to_string(kind)},
          {"severity", severity},
          {"target", to_string(target)},
          {"seed", seed},
          {"rgb_path", rgb_path.generic_string()},
          {"nir_path", nir_path.generic_string()}};
}

VariantRecord VariantRecord::from_json(const json& j) {
  try {
    VariantRecord r;
    r.item_id = j.at("item_id").get<std::string>();
    r.kind = parse_corruption_kind(j.at("kind").get<std::string>());
    r.severity = j.at("severity").get<int>();
    r.target = parse_corruption_target(j.at("target").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.rgb_path = j.at("rgb_path").get<std::string>();
    r.nir_path = j.at("nir_path").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("variant record: ") + e.what());
  }
}

CorruptDatasetResult corrupt_dataset(const DatasetManifest& manifest,
                                     const std::vector<CorruptionSpec>& specs,
                                     const fs::path& out_dir, const SeverityTable& table,
                                     const CorruptDatasetOptions& options) {
  for (const auto& spec : specs) spec.validate();
  const auto selected = manifest.select(options.split);
  const std::size_t n_items = selected.size();
  const std::size_t n_jobs = specs.size() * n_items;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<std::optional<VariantRecord>> records(n_jobs);
  std::vector<std::string> errors(n_jobs);

  parallel_for(n_jobs, options.threads, [&](std::size_t job) {
    const auto& spec = specs[job / n_items];
    const auto& item = manifest.items[selected[job % n_items]];
    try {
      const auto images = load_item_images(manifest, item);
      const auto pair = corrupt_multispectral(images.rgb, images.nir, spec, table,
                                              fnv1a64(item.item_id));
      VariantRecord rec;
      rec.item_id = item.item_id;
      rec.kind = spec.kind;
      rec.severity = spec.severity;
      rec.target = spec.target;
      rec.seed = spec.seed;
      const fs::path rel = variant_dir(spec);
      const std::string stem = file_stem_for(item.item_id);
      if (spec.target != CorruptionTarget::nir) {
        rec.rgb_path = rel / (stem + "_rgb.png");
        save_raster(pair.rgb, out_dir / rec.rgb_path);
      } else {
        rec.rgb_path = fs::absolute(manifest.resolve(item.rgb_path)).lexically_normal();
      }
      if (spec.target != CorruptionTarget::rgb) {
        rec.nir_path = rel / (stem + "_nir.png");
        save_raster(pair.nir, out_dir / rec.nir_path);
      } else {
        rec.nir_path = fs::absolute(manifest.resolve(item.nir_path)).lexically_normal();
      }
      records[job] = std::move(rec);
    } catch (const std::exception& e) {
      errors[job] = item.item_id + ": " + e.what();
    }
  });

  CorruptDatasetResult result;
  result.manifest = manifest;
  for (std::size_t job = 0; job < n_jobs; ++job) {
    if (records[job]) {
      result.variants.push_back(std::move(*records[job]));
    } else {
      result.failures.push_back(std::move(errors[job]));
    }
  }

  std::ofstream out(out_dir / kVariantManifestName, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write variant manifest in '" + out_dir.string() + "'");
  for (auto& rec : result.variants) {
    out << rec.to_json().dump() << '\n';
    if (rec.rgb_path.is_relative()) rec.rgb_path = out_dir / rec.rgb_path;
    if (rec.nir_path.is_relative()) rec.nir_path = out_dir / rec.nir_path;
  }
  return result;
}

std::vector<VariantRecord> load_variant_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open variant manifest '" + path.string() + "'");
  std::vector<VariantRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("'" + path.string() + "': " + e.what());
    }
    auto rec = VariantRecord::from_json(j);
    if (rec.rgb_path.is_relative()) rec.rgb_path = path.parent_path() / rec.rgb_path;
    if (rec.nir_path.is_relative()) rec.nir_path = path.parent_path() / rec.nir_path;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace specband
