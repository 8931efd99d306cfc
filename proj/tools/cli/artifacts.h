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

#ifndef VLAFREEZE_TOOLS_CLI_ARTIFACTS_H_
#define VLAFREEZE_TOOLS_CLI_ARTIFACTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlafreeze/image.h"

namespace vlafreeze::cli {

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes);
// 16 lowercase hex digits.
std::string HexDigest(std::uint64_t value);

// Whole-file read; kMissingArtifact when the file cannot be opened.
std::string ReadFileBytes(const std::filesystem::path& path);
// Writes `bytes`, creating parent directories. kIo on failure.
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);
// Writes to a sibling temporary and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcNow();

// A directory that is assembled under a temporary sibling name and only
// appears at its final path on Commit(). An uncommitted staging directory is
// removed on destruction.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path target);
  ~StagedDirectory();
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;

  const std::filesystem::path& target() const { return target_; }
  // Where files go until Commit().
  const std::filesystem::path& staging() const { return staging_; }
  std::filesystem::path operator/(const std::filesystem::path& rel) const {
    return staging_ / rel;
  }
  // Replaces any existing directory at target().
  void Commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

// NumPy .npy (format 1.0, little-endian float64, C order).
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};
std::string EncodeNpy(std::span<const double> values,
                      const std::vector<std::size_t>& shape);
// Throws kParse for anything but a C-order '<f8' array.
NpyArray DecodeNpy(std::string_view bytes);
void WriteNpy(const std::filesystem::path& path, const Image& image);
void WriteNpy(const std::filesystem::path& path, std::span<const double> values,
              const Shape& shape);
// Reads an (H, W, C) array back into an Image.
Image ReadNpyImage(const std::filesystem::path& path);

// 8-bit PNG (gray, RGB or RGBA by channel count). Intensities are rounded
// to the nearest of 256 levels, so the file is a viewing copy only. Each
// (key, value) pair becomes a tEXt chunk.
std::string EncodePng(const Image& image,
                      const std::map<std::string, std::string>& text = {});
void WritePng(const std::filesystem::path& path, const Image& image,
              const std::map<std::string, std::string>& text = {});

// Paths from `paths` that do not exist, in order.
std::vector<std::filesystem::path> MissingPaths(
    const std::vector<std::filesystem::path>& paths);

}  // namespace vlafreeze::cli

#endif  // VLAFREEZE_TOOLS_CLI_ARTIFACTS_H_
