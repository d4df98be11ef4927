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

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sentinel/compression.hpp"
#include "sentinel/work_pool.hpp"

namespace sentinel {

// Flat array of same-algorithm digests. Capacity is fixed at construction so
// reduction levels never reallocate.
class DigestBuffer {
 public:
  DigestBuffer() = default;

  DigestBuffer(CompressionAlg alg, std::size_t capacity)
      : alg_(alg), width_(digest_length(alg)), storage_(capacity * width_) {}

  CompressionAlg alg() const noexcept { return alg_; }
  std::size_t count() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return width_ == 0 ? 0 : storage_.size() / width_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t storage_bytes() const noexcept { return storage_.size(); }

  void set_count(std::size_t n) {
    if (n > capacity()) throw InvalidState("digest buffer overflow");
    count_ = n;
  }

  ByteView entry(std::size_t i) const { return {storage_.data() + i * width_, width_}; }
  std::span<Byte> entry(std::size_t i) { return {storage_.data() + i * width_, width_}; }

  Digest digest(std::size_t i) const { return Digest(alg_, entry(i)); }

  void put(std::size_t i, const Digest& d) {
    auto dst = entry(i);
    std::copy(d.bytes().begin(), d.bytes().end(), dst.begin());
  }

  void push_back(const Digest& d) {
    set_count(count_ + 1);
    put(count_ - 1, d);
  }

 private:
  CompressionAlg alg_ = CompressionAlg::kSha256;
  std::size_t width_ = 0;
  std::size_t count_ = 0;
  std::vector<Byte> storage_;
};

/// Leaf stage with a caller-supplied block feeder: feed(i, hasher) pushes the
/// bytes of block i into hasher. Entries are written at their block index, so
/// the output order never depends on scheduling.
template <typename Feed>
DigestBuffer hash_blocks_with(CompressionAlg alg, std::size_t count, Feed&& feed, WorkPool& pool) {
  if (count == 0) throw InvalidInput("hash_blocks needs at least one block");
  DigestBuffer out(alg, count);
  out.set_count(count);
  pool.parallel_for_range(count, [&](std::size_t begin, std::size_t end) {
    Hasher& hasher = thread_hasher(alg);
    for (std::size_t i = begin; i < end; ++i) {
      feed(i, hasher);
      out.put(i, hasher.finish());
    }
  });
  return out;
}

inline DigestBuffer hash_blocks(CompressionAlg alg, std::span<const ByteView> blocks, WorkPool& pool) {
  return hash_blocks_with(
      alg, blocks.size(), [&](std::size_t i, Hasher& h) { h.update(blocks[i]); }, pool);
}

// Two swapped digest buffers for level-by-level reduction. The leaf buffer is
// adopted as the first input; the second buffer holds ceil(n/2) entries and is
// the only storage allocated for the reduction.
class ReductionState {
 public:
  explicit ReductionState(DigestBuffer leaves)
      : buffers_{std::move(leaves), DigestBuffer()} {
    std::size_t n = buffers_[0].count();
    buffers_[1] = DigestBuffer(buffers_[0].alg(), (n + 1) / 2);
  }

  CompressionAlg alg() const noexcept { return buffers_[0].alg(); }
  const DigestBuffer& active() const noexcept { return buffers_[active_]; }
  DigestBuffer& active() noexcept { return buffers_[active_]; }
  DigestBuffer& inactive() noexcept { return buffers_[1 - active_]; }
  std::size_t count() const noexcept { return active().count(); }

  /// Bytes allocated for the reduction beyond the adopted leaf buffer.
  std::size_t auxiliary_bytes() const noexcept { return buffers_[1].storage_bytes(); }

  void swap() noexcept { active_ = 1 - active_; }

 private:
  DigestBuffer buffers_[2];
  int active_ = 0;
};

/// One tree level: output j = h(in[2j] || in[2j+1]), with an all-zero padding
/// node standing in for in[2j+1] when the count is odd. Swaps the buffers and
/// returns the new count, ceil(old / 2).
inline std::size_t reduce_level(ReductionState& state, WorkPool& pool) {
  const std::size_t n = state.count();
  if (n < 2) throw InvalidState("reduce_level needs at least two digests");
  const std::size_t out_count = (n + 1) / 2;
  const DigestBuffer& in = state.active();
  DigestBuffer& out = state.inactive();
  out.set_count(out_count);
  const CompressionAlg alg = state.alg();
  pool.parallel_for_range(
      out_count,
      [&](std::size_t begin, std::size_t end) {
        Hasher& hasher = thread_hasher(alg);
        for (std::size_t j = begin; j < end; ++j) {
          hasher.update(in.entry(2 * j));
          if (2 * j + 1 < n) {
            hasher.update(in.entry(2 * j + 1));
          } else {
            hasher.update_zeros(in.width());
          }
          out.put(j, hasher.finish());
        }
      },
      std::max<std::size_t>(64, out_count / (pool.workers() * 4)));
  state.swap();
  return out_count;
}

struct MerkleRootResult {
  Digest root;
  std::size_t reduction_bytes = 0;
};

/// Root with reduction accounting. A single leaf is returned unchanged.
inline MerkleRootResult merkle_root_accounted(DigestBuffer leaves, WorkPool& pool) {
  if (leaves.count() == 0) throw InvalidInput("merkle_root needs at least one leaf");
  if (leaves.count() == 1) return {leaves.digest(0), 0};
  ReductionState state(std::move(leaves));
  while (state.count() > 1) reduce_level(state, pool);
  return {state.active().digest(0), state.auxiliary_bytes()};
}

inline Digest merkle_root(DigestBuffer leaves, WorkPool& pool) {
  return merkle_root_accounted(std::move(leaves), pool).root;
}

}  // namespace sentinel
