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

#ifndef SEMCACHE_RNG_H_
#define SEMCACHE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace semcache {

using Rng = std::mt19937_64;

// Derives an independent seed for a named sub-stream so that, for example,
// arrivals and cost noise can be paired across policies while each policy
// keeps its own exploration randomness.
inline std::uint64_t SubstreamSeed(std::uint64_t base, std::string_view tag) {
  // FNV-1a over the tag, then one splitmix64 round.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = base ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng MakeRng(std::uint64_t base, std::string_view tag) {
  return Rng(SubstreamSeed(base, tag));
}

}  // namespace semcache

#endif  // SEMCACHE_RNG_H_
