// Copyright 2026 The Sentinel Authors
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

// Lattice (LtHash) digests: 64-byte BLAKE2b outputs read as 32 lanes of 16
// bits, combined lane-wise modulo 2^16. The sum of index-tagged block hashes
// is order invariant and set homomorphic.

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/bytes.hpp"
#include "sentinel/compression.hpp"
#include "sentinel/work_pool.hpp"

namespace sentinel {

inline constexpr std::size_t kLatticeWords = 8;
inline constexpr std::size_t kLatticePartitions = 32;
inline constexpr std::size_t kLatticeBytes = 64;

/// Name of the lattice construction in digest maps.
inline constexpr std::string_view kLatticeDigestName = "lthash-blake2b";

struct LatticeDigest {
  std::array<std::uint64_t, kLatticeWords> words{};

  /// Little-endian packing: byte 8w+b is bits [8b, 8b+8) of words[w].
  static LatticeDigest from_bytes(ByteView bytes) {
    if (bytes.size() != kLatticeBytes) throw InvalidInput("lattice digest needs 64 bytes");
    LatticeDigest d;
    for (std::size_t w = 0; w < kLatticeWords; ++w) d.words[w] = load_le64(bytes.data() + 8 * w);
    return d;
  }

  static LatticeDigest from_hex(std::string_view hex) {
    Bytes raw = sentinel::from_hex(hex);
    if (raw.size() != kLatticeBytes) throw FormatError("lattice digest hex must be 128 characters");
    return from_bytes(raw);
  }

  std::array<Byte, kLatticeBytes> to_bytes() const {
    std::array<Byte, kLatticeBytes> out{};
    for (std::size_t w = 0; w < kLatticeWords; ++w) {
      auto b = le64(words[w]);
      std::copy(b.begin(), b.end(), out.begin() + 8 * w);
    }
    return out;
  }

  std::string hex() const {
    auto b = to_bytes();
    return to_hex(b);
  }

  /// Lane i: bits [16i, 16i + 16) of the concatenated words.
  std::uint16_t partition(std::size_t i) const {
    return static_cast<std::uint16_t>(words[i / 4] >> (16 * (i % 4)));
  }

  friend bool operator==(const LatticeDigest&, const LatticeDigest&) = default;
};

inline LatticeDigest lt_zero() { return {}; }

namespace detail {
inline constexpr std::uint64_t kEvenLanes = 0x0000FFFF0000FFFFull;
inline constexpr std::uint64_t kOddLanes = 0xFFFF0000FFFF0000ull;
inline constexpr std::uint64_t kLaneOnes = 0x0001000100010001ull;

// Four 16-bit lane additions in one word: even and odd lanes are added
// separately with the other lanes masked to zero, so a lane's carry lands in
// a masked gap and is cleared before the halves are OR-combined. The carry
// out of the top lane falls off the word.
constexpr std::uint64_t lane_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t even = ((a & kEvenLanes) + (b & kEvenLanes)) & kEvenLanes;
  std::uint64_t odd = ((a & kOddLanes) + (b & kOddLanes)) & kOddLanes;
  return even | odd;
}

// Lane-wise two's complement negation.
constexpr std::uint64_t lane_neg(std::uint64_t a) { return lane_add(~a, kLaneOnes); }
}  // namespace detail

inline LatticeDigest lt_add(const LatticeDigest& a, const LatticeDigest& b) {
  LatticeDigest out;
  for (std::size_t w = 0; w < kLatticeWords; ++w) out.words[w] = detail::lane_add(a.words[w], b.words[w]);
  return out;
}

inline LatticeDigest lt_neg(const LatticeDigest& a) {
  LatticeDigest out;
  for (std::size_t w = 0; w < kLatticeWords; ++w) out.words[w] = detail::lane_neg(a.words[w]);
  return out;
}

inline LatticeDigest lt_sub(const LatticeDigest& a, const LatticeDigest& b) {
  return lt_add(a, lt_neg(b));
}

inline LatticeDigest& operator+=(LatticeDigest& a, const LatticeDigest& b) { return a = lt_add(a, b); }
inline LatticeDigest& operator-=(LatticeDigest& a, const LatticeDigest& b) { return a = lt_sub(a, b); }

/// BLAKE2b-512 over LE64(tag_0) || ... || LE64(tag_k) || data, read as a
/// lattice digest. The hasher must be a BLAKE2b hasher.
inline LatticeDigest lt_hash_tagged(Hasher& hasher, std::span<const std::uint64_t> tags, ByteView data) {
  for (std::uint64_t t : tags) {
    auto enc = le64(t);
    hasher.update(enc);
  }
  hasher.update(data);
  return LatticeDigest::from_bytes(hasher.finish().bytes());
}

inline LatticeDigest lt_hash_tagged(std::initializer_list<std::uint64_t> tags, ByteView data) {
  return lt_hash_tagged(thread_hasher(CompressionAlg::kBlake2b), {tags.begin(), tags.size()}, data);
}

/// Block hash with its index prepended as LE64.
inline LatticeDigest lt_hash_block(std::uint64_t index, ByteView data) {
  return lt_hash_tagged({index}, data);
}

inline LatticeDigest lt_hash_block(std::uint64_t index, std::string_view data) {
  return lt_hash_block(index, as_bytes(data));
}

/// Lane-wise modular sum of a sequence, reduced as a pairwise tree over two
/// swapped buffers. Empty input gives lt_zero().
inline LatticeDigest lt_reduce(std::span<const LatticeDigest> digests, WorkPool& pool) {
  if (digests.empty()) return lt_zero();
  if (digests.size() == 1) return digests[0];
  std::size_t n = digests.size();
  std::vector<LatticeDigest> a((n + 1) / 2);
  std::vector<LatticeDigest> b((n + 3) / 4);
  std::span<const LatticeDigest> in = digests;
  std::vector<LatticeDigest>* out = &a;
  const std::size_t grain = 1024;
  while (n > 1) {
    std::size_t half = (n + 1) / 2;
    pool.parallel_for_range(
        half,
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t j = begin; j < end; ++j) {
            (*out)[j] = 2 * j + 1 < n ? lt_add(in[2 * j], in[2 * j + 1]) : in[2 * j];
          }
        },
        grain);
    in = std::span<const LatticeDigest>(out->data(), half);
    out = (out == &a) ? &b : &a;
    n = half;
  }
  return in[0];
}

inline LatticeDigest lt_reduce(std::span<const LatticeDigest> digests) {
  LatticeDigest acc;
  for (const auto& d : digests) acc += d;
  return acc;
}

}  // namespace sentinel
