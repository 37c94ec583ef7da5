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

#include "specband/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <set>

#include <json.hpp>

#include "specband/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace specband {
namespace {

constexpr const char* kNamesKey = "specband:channels";

struct PngErrorState {
  char message[256] = {0};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  longjmp(png_jmpbuf(png), 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::vector<std::string> default_names(std::size_t channels) {
  switch (channels) {
    case 1: return {"L"};
    case 2: return {"L", "A"};
    case 3: return {"R", "G", "B"};
    default: return {"R", "G", "B", "A"};
  }
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

// Raw decode. All objects with destructors live outside the setjmp region.
struct DecodedPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<unsigned char> bytes;
  std::vector<png_bytep> rows;
  std::string names_text;
};

void decode_png(std::FILE* fp, DecodedPng& out, PngErrorState& err, bool& failed) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error,
                                           on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::snprintf(err.message, sizeof(err.message), "out of memory");
    failed = true;
    return;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    failed = true;
    return;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    std::snprintf(err.message, sizeof(err.message), "palette PNGs are not supported");
    png_destroy_read_struct(&png, &info, nullptr);
    failed = true;
    return;
  }
  if (out.bit_depth != 8 && out.bit_depth != 16) {
    std::snprintf(err.message, sizeof(err.message), "unsupported bit depth %d",
                  out.bit_depth);
    png_destroy_read_struct(&png, &info, nullptr);
    failed = true;
    return;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  out.channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * out.height);
  out.rows.resize(out.height);
  for (png_uint_32 y = 0; y < out.height; ++y) out.rows[y] = out.bytes.data() + y * rowbytes;
  png_read_image(png, out.rows.data());
  png_read_end(png, info);
  png_textp text = nullptr;
  int num_text = 0;
  if (png_get_text(png, info, &text, &num_text) > 0) {
    for (int i = 0; i < num_text; ++i) {
      if (std::strcmp(text[i].key, kNamesKey) == 0) {
        out.names_text.assign(text[i].text, text[i].text_length);
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
}

MultiChannelImage load_png(const fs::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open '" + path.string() + "'");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }
  std::rewind(fp.get());

  DecodedPng raw;
  PngErrorState err;
  bool failed = false;
  decode_png(fp.get(), raw, err, failed);
  if (failed) throw FormatError("'" + path.string() + "': " + err.message);

  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  const auto channels = static_cast<std::size_t>(raw.channels);
  std::vector<Plane> planes(channels, Plane(n));
  const std::size_t step = raw.bit_depth == 16 ? 2 : 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = raw.bytes.data() + (i * channels + c) * step;
      planes[c][i] = step == 2 ? static_cast<Sample>((p[0] << 8) | p[1]) : p[0];
    }
  }
  auto names = default_names(channels);
  if (!raw.names_text.empty()) {
    auto stored = split_names(raw.names_text);
    if (stored.size() == channels) names = std::move(stored);
  }
  return MultiChannelImage(raw.width, raw.height, raw.bit_depth, std::move(names),
                           std::move(planes));
}

void encode_png(std::FILE* fp, const std::vector<unsigned char>& bytes, png_uint_32 width,
                png_uint_32 height, int bit_depth, int color_type, std::size_t rowbytes,
                const std::string& names, PngErrorState& err, bool& failed) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error,
                                            on_png_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    std::snprintf(err.message, sizeof(err.message), "out of memory");
    failed = true;
    return;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    failed = true;
    return;
  }
  png_init_io(png, fp);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_text text{};
  text.compression = PNG_TEXT_COMPRESSION_NONE;
  text.key = const_cast<char*>(kNamesKey);
  text.text = const_cast<char*>(names.c_str());
  text.text_length = names.size();
  png_set_text(png, info, &text, 1);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_write_row(png, bytes.data() + y * rowbytes);
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

void save_png(const MultiChannelImage& img, const fs::path& path) {
  const std::size_t channels = img.channel_count();
  int color_type = 0;
  switch (channels) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default:
      throw InvalidArgument("a single PNG holds 1-4 channels; use a sidecar directory for " +
                            std::to_string(channels));
  }
  const std::size_t step = img.bit_depth() == 16 ? 2 : 1;
  const std::size_t rowbytes = img.width() * channels * step;
  std::vector<unsigned char> bytes(rowbytes * img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      unsigned char* p = bytes.data() + (i * channels + c) * step;
      const Sample v = img.planes()[c][i];
      if (step == 2) {
        p[0] = static_cast<unsigned char>(v >> 8);
        p[1] = static_cast<unsigned char>(v & 0xff);
      } else {
        p[0] = static_cast<unsigned char>(v);
      }
    }
  }
  std::string names;
  for (const auto& name : img.channel_names()) {
    if (!names.empty()) names += ',';
    names += name;
  }

  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write '" + path.string() + "'");
  PngErrorState err;
  bool failed = false;
  encode_png(fp.get(), bytes, static_cast<png_uint_32>(img.width()),
             static_cast<png_uint_32>(img.height()), img.bit_depth(), color_type, rowbytes,
             names, err, failed);
  if (failed) throw IoError("'" + path.string() + "': " + err.message);
  if (std::fflush(fp.get()) != 0) throw IoError("cannot write '" + path.string() + "'");
}

std::string plane_file_name(const std::string& name, std::set<std::string>& used) {
  std::string base;
  for (char ch : name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
    base += ok ? ch : '_';
  }
  std::string file = base + ".png";
  for (int i = 1; !used.insert(file).second; ++i) {
    file = base + "_" + std::to_string(i) + ".png";
  }
  return file;
}

MultiChannelImage load_sidecar(const fs::path& dir) {
  const fs::path manifest = dir / kSidecarName;
  std::ifstream in(manifest);
  if (!in) throw IoError("missing sidecar manifest '" + manifest.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError("'" + manifest.string() + "': " + e.what());
  }
  try {
    const auto width = doc.at("width").get<std::size_t>();
    const auto height = doc.at("height").get<std::size_t>();
    const auto bit_depth = doc.at("bit_depth").get<int>();
    std::vector<std::string> names;
    std::vector<Plane> planes;
    for (const auto& entry : doc.at("channels")) {
      auto name = entry.at("name").get<std::string>();
      auto plane_img = load_png(dir / entry.at("file").get<std::string>());
      if (plane_img.channel_count() != 1) {
        throw FormatError("sidecar plane '" + name + "' is not single-channel");
      }
      if (plane_img.width() != width || plane_img.height() != height) {
        throw FormatError("sidecar plane '" + name + "' has mismatched dimensions");
      }
      if (plane_img.bit_depth() != bit_depth) {
        throw FormatError("sidecar plane '" + name + "' has mismatched bit depth");
      }
      names.push_back(std::move(name));
      planes.push_back(plane_img.planes().front());
    }
    return MultiChannelImage(width, height, bit_depth, std::move(names), std::move(planes));
  } catch (const json::exception& e) {
    throw FormatError("'" + manifest.string() + "': " + e.what());
  }
}

void save_sidecar(const MultiChannelImage& img, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  json channels = json::array();
  std::set<std::string> used;
  for (std::size_t c = 0; c < img.channel_count(); ++c) {
    const auto& name = img.channel_names()[c];
    const std::string file = plane_file_name(name, used);
    save_png(take_channel(img, c), dir / file);
    channels.push_back(json{{"name", name}, {"file", file}});
  }
  json doc = {{"width", img.width()},
              {"height", img.height()},
              {"bit_depth", img.bit_depth()},
              {"channels", channels}};
  std::ofstream out(dir / kSidecarName, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write sidecar in '" + dir.string() + "'");
  out << doc.dump(2) << '\n';
}

bool has_png_extension(const fs::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".png";
}

}  // namespace

MultiChannelImage load_raster(const fs::path& path) {
  if (fs::is_directory(path)) return load_sidecar(path);
  if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
  return load_png(path);
}

void save_raster(const MultiChannelImage& img, const fs::path& path) {
  if (img.empty()) throw InvalidArgument("cannot save an image without channels");
  if (has_png_extension(path)) {
    save_png(img, path);
  } else {
    save_sidecar(img, path);
  }
}

}  // namespace specband
