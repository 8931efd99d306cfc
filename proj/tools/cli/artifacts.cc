// Copyright 2026 The vlafreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/artifacts.h"

#include <png.h>
#include <unistd.h>

#include <atomic>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "vlafreeze/error.h"

namespace vlafreeze::cli {
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              ".npy writer assumes a little-endian host");

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string HexDigest(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kMissingArtifact, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileBytes(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "short write to " + path.string());
}

void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  WriteFileBytes(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    Fail(ErrorCode::kIo, "cannot move " + tmp.string() + " into place");
  }
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------

namespace {
std::atomic<unsigned> staging_counter{0};

fs::path SiblingName(const fs::path& target, std::string_view tag) {
  fs::path name = target.filename();
  if (name.empty()) name = target.parent_path().filename();
  const fs::path dir = target.has_parent_path() ? target.parent_path() : ".";
  return dir / ("." + name.string() + "." + std::string(tag) + "-" +
                std::to_string(::getpid()) + "-" +
                std::to_string(staging_counter++));
}
}  // namespace

StagedDirectory::StagedDirectory(fs::path target) : target_(std::move(target)) {
  if (target_.empty()) Fail(ErrorCode::kValidation, "empty output directory");
  std::error_code ec;
  if (target_.has_parent_path()) fs::create_directories(target_.parent_path(), ec);
  staging_ = SiblingName(target_, "staging");
  fs::remove_all(staging_, ec);
  if (!fs::create_directories(staging_, ec) || ec) {
    Fail(ErrorCode::kIo, "cannot create " + staging_.string());
  }
}

StagedDirectory::~StagedDirectory() {
  if (committed_) return;
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void StagedDirectory::Commit() {
  if (committed_) return;
  std::error_code ec;
  fs::path old;
  if (fs::exists(target_, ec)) {
    old = SiblingName(target_, "old");
    fs::rename(target_, old, ec);
    if (ec) Fail(ErrorCode::kIo, "cannot replace " + target_.string());
  }
  fs::rename(staging_, target_, ec);
  if (ec) {
    if (!old.empty()) fs::rename(old, target_, ec);
    Fail(ErrorCode::kIo, "cannot move " + staging_.string() + " to " +
                             target_.string());
  }
  committed_ = true;
  if (!old.empty()) fs::remove_all(old, ec);
}

// ---------------------------------------------------------------------------

std::string EncodeNpy(std::span<const double> values,
                      const std::vector<std::size_t>& shape) {
  std::size_t count = 1;
  for (std::size_t d : shape) count *= d;
  if (count != values.size()) {
    Fail(ErrorCode::kDimension, "npy shape does not match value count");
  }
  std::string dims;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dims += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) dims += ",";
    if (i + 1 < shape.size()) dims += " ";
  }
  std::string header =
      "{'descr': '<f8', 'fortran_order': False, 'shape': (" + dims + "), }";
  // Magic (6) + version (2) + length (2) + header, padded to 64 bytes.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::string out("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  out += static_cast<char>(len & 0xff);
  out += static_cast<char>(len >> 8);
  out += header;
  const std::size_t offset = out.size();
  out.resize(offset + values.size() * sizeof(double));
  std::memcpy(out.data() + offset, values.data(),
              values.size() * sizeof(double));
  return out;
}

NpyArray DecodeNpy(std::string_view bytes) {
  auto bad = [](const std::string& what) -> NpyArray {
    Fail(ErrorCode::kParse, "npy: " + what);
  };
  if (bytes.size() < 10 || bytes.substr(0, 6) != std::string_view("\x93NUMPY", 6)) {
    return bad("missing magic");
  }
  if (bytes[6] != 1) return bad("only format version 1.0 is read");
  const std::size_t len = static_cast<unsigned char>(bytes[8]) |
                          static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8;
  if (bytes.size() < 10 + len) return bad("truncated header");
  const std::string_view header = bytes.substr(10, len);
  if (header.find("'descr': '<f8'") == std::string_view::npos) {
    return bad("dtype must be '<f8'");
  }
  if (header.find("'fortran_order': False") == std::string_view::npos) {
    return bad("fortran_order arrays are not supported");
  }
  const std::size_t open = header.find("'shape': (");
  const std::size_t close = header.find(')', open);
  if (open == std::string_view::npos || close == std::string_view::npos) {
    return bad("no shape");
  }
  NpyArray out;
  std::string dims(header.substr(open + 10, close - open - 10));
  std::size_t count = 1;
  std::istringstream in(dims);
  for (std::string part; std::getline(in, part, ',');) {
    const auto first = part.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    try {
      out.shape.push_back(std::stoull(part.substr(first)));
    } catch (const std::exception&) {
      return bad("bad shape entry '" + part + "'");
    }
    count *= out.shape.back();
  }
  const std::string_view data = bytes.substr(10 + len);
  if (data.size() != count * sizeof(double)) return bad("data size mismatch");
  out.values.resize(count);
  std::memcpy(out.values.data(), data.data(), data.size());
  return out;
}

void WriteNpy(const fs::path& path, std::span<const double> values,
              const Shape& shape) {
  WriteFileBytes(path, EncodeNpy(values, {static_cast<std::size_t>(shape.height),
                                          static_cast<std::size_t>(shape.width),
                                          static_cast<std::size_t>(shape.channels)}));
}

void WriteNpy(const fs::path& path, const Image& image) {
  WriteNpy(path, image.pixels(), image.shape());
}

Image ReadNpyImage(const fs::path& path) {
  NpyArray array = DecodeNpy(ReadFileBytes(path));
  if (array.shape.size() != 3) {
    Fail(ErrorCode::kParse, path.string() + ": expected an (H, W, C) array");
  }
  Shape shape{static_cast<int>(array.shape[0]), static_cast<int>(array.shape[1]),
              static_cast<int>(array.shape[2])};
  return Image(shape, std::move(array.values));
}

// ---------------------------------------------------------------------------

namespace {

void AppendToString(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void NoFlush(png_structp) {}

// Only plain C state lives across setjmp here.
bool EncodePngRaw(std::string* out, int width, int height, int color,
                  png_bytep* rows, png_text* text, int text_count) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, AppendToString, NoFlush);
  png_set_IHDR(png, info, width, height, 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (text_count > 0) png_set_text(png, info, text, text_count);
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

std::string EncodePng(const Image& image,
                      const std::map<std::string, std::string>& text) {
  const Shape& shape = image.shape();
  int color = 0;
  switch (shape.channels) {
    case 1: color = PNG_COLOR_TYPE_GRAY; break;
    case 2: color = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color = PNG_COLOR_TYPE_RGB; break;
    case 4: color = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default:
      Fail(ErrorCode::kDimension,
           "PNG export needs 1 to 4 channels, got " + shape.ToString());
  }

  std::vector<png_byte> rows(image.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = static_cast<png_byte>(std::lround(image.pixels()[i] * 255.0));
  }
  std::vector<png_bytep> row_ptrs(shape.height);
  const std::size_t stride = static_cast<std::size_t>(shape.width) * shape.channels;
  for (int r = 0; r < shape.height; ++r) row_ptrs[r] = rows.data() + r * stride;

  // Keys and values must outlive png_write_png.
  std::vector<std::string> keys, values;
  for (const auto& [k, v] : text) {
    keys.push_back(k.substr(0, 79));
    values.push_back(v);
  }
  std::vector<png_text> chunks(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = keys[i].data();
    chunks[i].text = values[i].data();
    chunks[i].text_length = values[i].size();
  }

  std::string out;
  if (!EncodePngRaw(&out, shape.width, shape.height, color, row_ptrs.data(),
                    chunks.data(), static_cast<int>(chunks.size()))) {
    Fail(ErrorCode::kIo, "libpng failed while encoding");
  }
  return out;
}

void WritePng(const fs::path& path, const Image& image,
              const std::map<std::string, std::string>& text) {
  WriteFileBytes(path, EncodePng(image, text));
}

std::vector<fs::path> MissingPaths(const std::vector<fs::path>& paths) {
  std::vector<fs::path> missing;
  std::error_code ec;
  for (const auto& p : paths) {
    if (!fs::exists(p, ec)) missing.push_back(p);
  }
  return missing;
}

}  // namespace vlafreeze::cli
