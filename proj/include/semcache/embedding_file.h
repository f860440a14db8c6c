// Copyright 2026 The Authors.
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

#ifndef SEMCACHE_EMBEDDING_FILE_H_
#define SEMCACHE_EMBEDDING_FILE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semcache/geometry.h"

namespace semcache {

// On-disk query universe shared with the export tooling.
//
// Binary layout (little-endian):
//   char[4]  magic "SEMC"
//   u32      version (1)
//   u64      count
//   u32      dim
//   f32      coords[count * dim]      (row-major; need not be normalized)
//   u32      token_lengths[count]
//   u32      source_tags[count]       (optional; present iff bytes remain)
//
// The CSV debug format has one row per query:
//   id,token_len,source,x0,x1,...,x{dim-1}
// with an optional header row. Non-numeric source names are mapped to ids in
// order of first appearance.
struct EmbeddingSet {
  std::vector<Embedding> embeddings;  // unit-normalized on load
  std::vector<std::uint32_t> token_lengths;
  std::vector<std::uint32_t> source_tags;  // empty when the file has none
  std::vector<std::string> source_names;   // CSV only

  std::size_t size() const { return embeddings.size(); }
  std::size_t dim() const {
    return embeddings.empty() ? 0 : embeddings.front().dim();
  }
};

inline constexpr std::uint32_t kEmbeddingFileVersion = 1;

// Detects the format from the magic bytes. Throws ConfigError on malformed
// input (bad magic, truncated payload, ragged CSV rows).
EmbeddingSet ReadEmbeddingFile(const std::filesystem::path& path);
EmbeddingSet ReadEmbeddingBinary(const std::filesystem::path& path);
EmbeddingSet ReadEmbeddingCsv(const std::filesystem::path& path);

// Writes the binary format. Coordinates are narrowed to float32. Source tags
// are written only when non-empty.
void WriteEmbeddingBinary(const std::filesystem::path& path,
                          const EmbeddingSet& set);

}  // namespace semcache

#endif  // SEMCACHE_EMBEDDING_FILE_H_
