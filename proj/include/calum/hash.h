// Copyright 2026 The Calum Authors.
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

#ifndef CALUM_HASH_H_
#define CALUM_HASH_H_

#include <cstdint>
#include <string_view>

namespace calum {

inline constexpr uint64_t kFnvOffsetBasis = 0xCBF29CE484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001B3ULL;

// FNV-1a 64-bit. `h` allows incremental hashing of several pieces.
constexpr uint64_t Fnv1a64(std::string_view bytes,
                           uint64_t h = kFnvOffsetBasis) {
  for (const char c : bytes) {
    h ^= static_cast<uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace calum

#endif  // CALUM_HASH_H_
