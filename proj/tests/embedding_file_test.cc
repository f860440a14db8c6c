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

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "semcache/errors.h"

namespace semcache {
namespace {

const std::filesystem::path kData = SEMCACHE_TEST_DATA;

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("semcache_ef_" + name);
}

void ExpectFixture(const EmbeddingSet& s) {
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.dim(), 4u);
  EXPECT_DOUBLE_EQ(s.embeddings[0][0], 1.0);
  EXPECT_NEAR(s.embeddings[1][1], 0.6, 1e-7);
  EXPECT_NEAR(s.embeddings[1][2], 0.8, 1e-7);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.embeddings[2][i], 0.5, 1e-7);
  EXPECT_EQ(s.token_lengths, (std::vector<std::uint32_t>{5, 30, 12}));
}

TEST(EmbeddingFile, ReadsBinaryFixture) {
  const EmbeddingSet s = ReadEmbeddingFile(kData / "tiny.semc");
  ExpectFixture(s);
  EXPECT_EQ(s.source_tags, (std::vector<std::uint32_t>{0, 1, 0}));
}

TEST(EmbeddingFile, SourceTagsOptional) {
  const EmbeddingSet s = ReadEmbeddingFile(kData / "tiny_notags.semc");
  ExpectFixture(s);
  EXPECT_TRUE(s.source_tags.empty());
}

TEST(EmbeddingFile, ReadsCsvFixture) {
  const EmbeddingSet s = ReadEmbeddingFile(kData / "tiny.csv");
  ExpectFixture(s);
  EXPECT_EQ(s.source_tags, (std::vector<std::uint32_t>{0, 1, 0}));
  EXPECT_EQ(s.source_names, (std::vector<std::string>{"nq", "trivia"}));
}

TEST(EmbeddingFile, BinaryRoundTrip) {
  EmbeddingSet s = ReadEmbeddingFile(kData / "tiny.semc");
  const auto path = TempPath("roundtrip.semc");
  WriteEmbeddingBinary(path, s);
  const EmbeddingSet back = ReadEmbeddingFile(path);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.dim(); ++j) {
      EXPECT_NEAR(back.embeddings[i][j], s.embeddings[i][j], 1e-7);
    }
  }
  EXPECT_EQ(back.token_lengths, s.token_lengths);
  EXPECT_EQ(back.source_tags, s.source_tags);
  // Byte-identical on a second write of the reloaded set.
  const auto path2 = TempPath("roundtrip2.semc");
  WriteEmbeddingBinary(path2, back);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
}

TEST(EmbeddingFile, MalformedInputsThrow) {
  const auto bad = TempPath("bad.semc");
  {
    std::ofstream f(bad, std::ios::binary);
    f << "SEMX0000000000000000";
  }
  EXPECT_THROW(ReadEmbeddingBinary(bad), ConfigError);

  // Truncate the fixture inside the coordinate block.
  std::ifstream in(kData / "tiny.semc", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  const auto cut = TempPath("cut.semc");
  {
    std::ofstream f(cut, std::ios::binary);
    f.write(bytes.data(), 40);
  }
  EXPECT_THROW(ReadEmbeddingFile(cut), ConfigError);

  const auto ragged = TempPath("ragged.csv");
  {
    std::ofstream f(ragged);
    f << "0,5,a,1,0\n1,6,a,1\n";
  }
  EXPECT_THROW(ReadEmbeddingFile(ragged), ConfigError);
  EXPECT_THROW(ReadEmbeddingFile(TempPath("missing.semc")), ConfigError);
}

}  // namespace
}  // namespace semcache
