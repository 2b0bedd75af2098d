/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vogrid/util.hpp"

namespace vogrid {

/// File content as stored on a simulated Storage Element. Small artifacts
/// (JDL, JIO, task objects, histograms) carry real bytes; bulk data carries
/// only a (size, seed) pair, which is enough to give every file a stable
/// content digest without materializing gigabytes.
struct Blob {
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> bytes;

  static Blob of_bytes(std::string data) {
    Blob b;
    b.size = data.size();
    b.seed = fnv1a(data);
    b.bytes = std::move(data);
    return b;
  }

  static Blob simulated(std::uint64_t size, std::uint64_t seed) {
    Blob b;
    b.size = size;
    b.seed = seed;
    return b;
  }

  std::uint64_t digest() const {
    if (bytes) return mix64(fnv1a(*bytes), size);
    return mix64(seed, size);
  }

  bool operator==(const Blob& o) const {
    return size == o.size && digest() == o.digest();
  }
};

}  // namespace vogrid
