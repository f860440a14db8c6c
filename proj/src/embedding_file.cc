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

#include "semcache/embedding_file.h"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "semcache/errors.h"

namespace semcache {
namespace {

static_assert(std::endian::native == std::endian::little,
              "embedding file I/O assumes a little-endian host");

constexpr std::array<char, 4> kMagic = {'S', 'E', 'M', 'C'};

template <typename T>
T ReadPod(std::istream& in, const std::filesystem::path& path,
          const char* field) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw ConfigError(path.string() + ": truncated while reading " + field);
  }
  return value;
}

template <typename T>
void WritePod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool ParseU32(const std::string& s, std::uint32_t* out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

EmbeddingSet ReadEmbeddingFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embedding file " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  if (in && head == kMagic) return ReadEmbeddingBinary(path);
  return ReadEmbeddingCsv(path);
}

EmbeddingSet ReadEmbeddingBinary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embedding file " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw ConfigError(path.string() + ": bad magic, expected SEMC");
  }
  const auto version = ReadPod<std::uint32_t>(in, path, "version");
  if (version != kEmbeddingFileVersion) {
    throw ConfigError(path.string() + ": unsupported version " +
                      std::to_string(version));
  }
  const auto count = ReadPod<std::uint64_t>(in, path, "count");
  const auto dim = ReadPod<std::uint32_t>(in, path, "dim");
  if (dim == 0) throw ConfigError(path.string() + ": dim must be positive");

  EmbeddingSet set;
  set.embeddings.reserve(count);
  std::vector<float> row(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(dim * sizeof(float)));
    if (!in) throw ConfigError(path.string() + ": truncated coordinates");
    set.embeddings.push_back(
        Embedding::Normalized(std::vector<double>(row.begin(), row.end())));
  }
  set.token_lengths.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    set.token_lengths[i] = ReadPod<std::uint32_t>(in, path, "token lengths");
  }
  // Source tags are optional: either absent or exactly `count` entries.
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto remaining = static_cast<std::uint64_t>(in.tellg() - here);
  in.seekg(here);
  if (remaining == count * sizeof(std::uint32_t) && count > 0) {
    set.source_tags.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      set.source_tags[i] = ReadPod<std::uint32_t>(in, path, "source tags");
    }
  } else if (remaining != 0) {
    throw ConfigError(path.string() + ": " + std::to_string(remaining) +
                      " trailing bytes do not form a source-tag block");
  }
  return set;
}

EmbeddingSet ReadEmbeddingCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file " + path.string());
  EmbeddingSet set;
  std::map<std::string, std::uint32_t> source_ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = SplitCsv(line);
    std::uint32_t token_len = 0;
    if (fields.size() < 4 || !ParseU32(fields[1], &token_len)) {
      if (line_no == 1) continue;  // header row
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected id,token_len,source,coords...");
    }
    std::vector<double> coords;
    coords.reserve(fields.size() - 3);
    for (std::size_t i = 3; i < fields.size(); ++i) {
      double v = 0.0;
      if (!ParseDouble(fields[i], &v)) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                          ": bad coordinate '" + fields[i] + "'");
      }
      coords.push_back(v);
    }
    if (dim == 0) dim = coords.size();
    if (coords.size() != dim) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": ragged row");
    }
    std::uint32_t tag = 0;
    if (!ParseU32(fields[2], &tag)) {
      auto [it, inserted] = source_ids.try_emplace(
          fields[2], static_cast<std::uint32_t>(source_ids.size()));
      if (inserted) set.source_names.push_back(fields[2]);
      tag = it->second;
    }
    set.embeddings.push_back(Embedding::Normalized(std::move(coords)));
    set.token_lengths.push_back(token_len);
    set.source_tags.push_back(tag);
  }
  return set;
}

void WriteEmbeddingBinary(const std::filesystem::path& path,
                          const EmbeddingSet& set) {
  if (set.token_lengths.size() != set.size()) {
    throw ContractViolation("token_lengths must match embedding count");
  }
  if (!set.source_tags.empty() && set.source_tags.size() != set.size()) {
    throw ContractViolation("source_tags must be empty or match count");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  WritePod<std::uint32_t>(out, kEmbeddingFileVersion);
  WritePod<std::uint64_t>(out, set.size());
  WritePod<std::uint32_t>(out, static_cast<std::uint32_t>(set.dim()));
  for (const Embedding& e : set.embeddings) {
    for (double v : e.coords()) WritePod<float>(out, static_cast<float>(v));
  }
  for (std::uint32_t len : set.token_lengths) WritePod(out, len);
  for (std::uint32_t tag : set.source_tags) WritePod(out, tag);
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace semcache
