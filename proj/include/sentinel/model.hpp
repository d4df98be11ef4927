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

// Whole-model and per-layer digests over fragmented tensor collections.
//
// Three strategies are provided for both constructions:
//  - coalesced: copy every tensor into one zero-padded contiguous buffer,
//    then hash fixed-size blocks of it;
//  - per-layer: hash each tensor on its own into a layer digest, then reduce
//    the layer digests into the model digest;
//  - in-place: hash blocks where the tensors live, driven by a block table,
//    with each tensor's final block hashed at its true length.
// The strategies use different padding and indexing, so their digests only
// coincide when every tensor size is a multiple of the block size.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <new>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "sentinel/compression.hpp"
#include "sentinel/lattice.hpp"
#include "sentinel/merkle.hpp"
#include "sentinel/work_pool.hpp"

namespace sentinel {

struct TensorView {
  std::string_view name;
  ByteView data;
};

using ModelView = std::span<const TensorView>;

// Ordered named tensors, each in its own allocation.
class TensorMap {
 public:
  struct Entry {
    std::string name;
    Bytes data;
  };

  void add(std::string name, Bytes data) {
    if (index_.contains(name)) throw InvalidInput("duplicate layer name: " + name);
    index_.insert(name);
    entries_.push_back({std::move(name), std::move(data)});
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  Entry& operator[](std::size_t i) { return entries_[i]; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }

  std::uint64_t total_bytes() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) n += e.data.size();
    return n;
  }

  std::vector<TensorView> views() const {
    std::vector<TensorView> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back({e.name, e.data});
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_set<std::string> index_;
};

enum class Construction { kMerkle, kLattice };
enum class Strategy { kCoalesced, kPerLayer, kInPlace };

constexpr std::string_view construction_name(Construction c) {
  return c == Construction::kMerkle ? "merkle" : "lattice";
}

constexpr std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCoalesced: return "coalesced";
    case Strategy::kPerLayer: return "per-layer";
    case Strategy::kInPlace: return "in-place";
  }
  return "";
}

inline std::optional<Construction> parse_construction(std::string_view s) {
  if (s == "merkle") return Construction::kMerkle;
  if (s == "lattice") return Construction::kLattice;
  return std::nullopt;
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  for (auto v : {Strategy::kCoalesced, Strategy::kPerLayer, Strategy::kInPlace}) {
    if (strategy_name(v) == s) return v;
  }
  return std::nullopt;
}

inline constexpr std::size_t kDefaultModelBlockSize = 8192;

/// Block-index encoding recorded in attestation predicates.
inline constexpr std::string_view kIndexEncoding = "le64-prefix";

struct HashConfig {
  Construction construction = Construction::kMerkle;
  CompressionAlg alg = CompressionAlg::kSha256;
  Strategy strategy = Strategy::kInPlace;
  std::size_t block_size = kDefaultModelBlockSize;
  bool ordered_per_layer = false;

  static HashConfig merkle(CompressionAlg alg, Strategy strategy,
                           std::size_t block_size = kDefaultModelBlockSize) {
    return {Construction::kMerkle, alg, strategy, block_size, false};
  }

  static HashConfig lattice(Strategy strategy, bool ordered = false,
                            std::size_t block_size = kDefaultModelBlockSize) {
    return {Construction::kLattice, CompressionAlg::kBlake2b, strategy, block_size, ordered};
  }

  void validate() const {
    if (block_size < 64 || (block_size & (block_size - 1)) != 0) {
      throw ConfigError("block size must be a power of two and at least 64, got " +
                        std::to_string(block_size));
    }
    if (construction == Construction::kLattice && alg != CompressionAlg::kBlake2b) {
      throw ConfigError("lattice construction requires blake2b, got " + std::string(alg_name(alg)));
    }
    if (ordered_per_layer &&
        (construction != Construction::kLattice || strategy != Strategy::kPerLayer)) {
      throw ConfigError("ordered per-layer scheduling requires lattice + per-layer");
    }
  }

  friend bool operator==(const HashConfig&, const HashConfig&) = default;
};

using ModelDigest = std::variant<Digest, LatticeDigest>;

inline std::string digest_hex(const ModelDigest& d) {
  return std::visit([](const auto& v) { return v.hex(); }, d);
}

/// Key under which the digest appears in an attestation digest map.
inline std::string digest_key(const ModelDigest& d) {
  if (const auto* m = std::get_if<Digest>(&d)) return std::string(alg_name(m->alg()));
  return std::string(kLatticeDigestName);
}

struct LayerDigest {
  std::string name;
  ModelDigest digest;
};

// Auxiliary storage allocated by a strategy, beyond the model itself.
struct MemoryLedger {
  std::uint64_t staging_bytes = 0;    // contiguous copy (coalesced only)
  std::uint64_t table_bytes = 0;      // block lookup table (in-place only)
  std::uint64_t digest_bytes = 0;     // block and layer digest buffers
  std::uint64_t reduction_bytes = 0;  // swapped reduction buffers

  std::uint64_t total() const noexcept {
    return staging_bytes + table_bytes + digest_bytes + reduction_bytes;
  }
};

struct ModelDigestResult {
  ModelDigest model_digest;
  std::optional<std::vector<LayerDigest>> layer_digests;
  HashConfig config;
  std::uint64_t block_count = 0;
  MemoryLedger memory;
};

// One block of the in-place lookup table.
struct BlockRow {
  std::uint64_t global_index;
  std::size_t tensor;
  std::size_t offset;
  std::size_t length;
};

using BlockTable = std::vector<BlockRow>;

/// Covers every byte of every tensor exactly once, without padding; only a
/// tensor's final block may be shorter than block_size. Empty tensors add no
/// rows.
inline BlockTable build_block_table(ModelView model, std::size_t block_size) {
  BlockTable table;
  std::uint64_t k = 0;
  for (std::size_t t = 0; t < model.size(); ++t) {
    const std::size_t len = model[t].data.size();
    for (std::size_t off = 0; off < len; off += block_size) {
      table.push_back({k++, t, off, std::min(block_size, len - off)});
    }
  }
  return table;
}

namespace detail {

inline void require_hashable(ModelView model) {
  if (model.empty()) throw InvalidInput("model has no tensors");
  std::uint64_t total = 0;
  for (const auto& t : model) total += t.data.size();
  if (total == 0) throw InvalidInput("model has no bytes");
}

inline std::size_t blocks_for(std::size_t len, std::size_t block_size) {
  return (len + block_size - 1) / block_size;
}

// Scratch of the tree in lt_reduce for n inputs.
inline std::uint64_t lattice_reduction_bytes(std::size_t n) {
  if (n < 2) return 0;
  return ((n + 1) / 2 + (n + 3) / 4) * sizeof(LatticeDigest);
}

template <typename T>
std::vector<T> allocate(std::size_t n) {
  try {
    return std::vector<T>(n);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate " + std::to_string(n * sizeof(T)) + " bytes");
  }
}

// Merkle root over the zero-padded blocks of one tensor.
inline Digest merkle_padded_tensor(CompressionAlg alg, ByteView data, std::size_t block_size,
                                   WorkPool& pool, MemoryLedger& ledger, std::mutex& ledger_mutex) {
  if (data.empty()) return compress_block(alg, ByteView{});
  const std::size_t m = blocks_for(data.size(), block_size);
  auto leaves = hash_blocks_with(
      alg, m,
      [&](std::size_t j, Hasher& h) {
        const std::size_t off = j * block_size;
        const std::size_t len = std::min(block_size, data.size() - off);
        h.update(data.subspan(off, len));
        if (len < block_size) h.update_zeros(block_size - len);
      },
      pool);
  const std::uint64_t leaf_bytes = leaves.storage_bytes();
  auto root = merkle_root_accounted(std::move(leaves), pool);
  std::lock_guard lock(ledger_mutex);
  ledger.digest_bytes += leaf_bytes;
  ledger.reduction_bytes += root.reduction_bytes;
  return root.root;
}

// Lattice sum of one tensor's unpadded blocks, each tagged LE64(layer) || LE64(block).
inline LatticeDigest lattice_tensor(std::uint64_t layer, ByteView data, std::size_t block_size,
                                    WorkPool& pool, MemoryLedger& ledger, std::mutex& ledger_mutex) {
  const std::size_t m = blocks_for(data.size(), block_size);
  if (m == 0) return lt_zero();
  auto hashes = allocate<LatticeDigest>(m);
  pool.parallel_for_range(m, [&](std::size_t begin, std::size_t end) {
    Hasher& h = thread_hasher(CompressionAlg::kBlake2b);
    for (std::size_t j = begin; j < end; ++j) {
      const std::size_t off = j * block_size;
      const std::uint64_t tags[2] = {layer, j};
      hashes[j] = lt_hash_tagged(h, tags, data.subspan(off, std::min(block_size, data.size() - off)));
    }
  });
  LatticeDigest sum = lt_reduce(hashes, pool);
  std::lock_guard lock(ledger_mutex);
  ledger.digest_bytes += m * sizeof(LatticeDigest);
  ledger.reduction_bytes += lattice_reduction_bytes(m);
  return sum;
}

// Lattice sum over blocks addressed by a feeder: feed(i) returns block i.
template <typename BlockAt>
LatticeDigest lattice_global_blocks(std::size_t m, BlockAt&& block_at, WorkPool& pool,
                                    MemoryLedger& ledger) {
  auto hashes = allocate<LatticeDigest>(m);
  pool.parallel_for_range(m, [&](std::size_t begin, std::size_t end) {
    Hasher& h = thread_hasher(CompressionAlg::kBlake2b);
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t tag = i;
      hashes[i] = lt_hash_tagged(h, {&tag, 1}, block_at(i));
    }
  });
  ledger.digest_bytes += m * sizeof(LatticeDigest);
  ledger.reduction_bytes += lattice_reduction_bytes(m);
  return lt_reduce(hashes, pool);
}

}  // namespace detail

/// Copies all tensors into one buffer zero-padded to a block multiple, then
/// hashes it block by block. Lattice blocks carry their global index.
inline ModelDigestResult coalesce_hash(const HashConfig& cfg, ModelView model, WorkPool& pool) {
  detail::require_hashable(model);
  const std::size_t bs = cfg.block_size;
  std::uint64_t total = 0;
  for (const auto& t : model) total += t.data.size();
  const std::size_t m = detail::blocks_for(total, bs);

  ModelDigestResult result{Digest{}, std::nullopt, cfg, m, {}};
  auto buffer = detail::allocate<Byte>(m * bs);
  result.memory.staging_bytes = buffer.size();
  {
    std::vector<std::size_t> offsets(model.size());
    std::size_t off = 0;
    for (std::size_t i = 0; i < model.size(); ++i) {
      offsets[i] = off;
      off += model[i].data.size();
    }
    pool.parallel_for(model.size(), [&](std::size_t i) {
      std::copy(model[i].data.begin(), model[i].data.end(), buffer.begin() + offsets[i]);
    }, 1);
  }
  const ByteView whole(buffer);

  if (cfg.construction == Construction::kMerkle) {
    auto leaves = hash_blocks_with(
        cfg.alg, m, [&](std::size_t i, Hasher& h) { h.update(whole.subspan(i * bs, bs)); }, pool);
    result.memory.digest_bytes = leaves.storage_bytes();
    auto root = merkle_root_accounted(std::move(leaves), pool);
    result.memory.reduction_bytes = root.reduction_bytes;
    result.model_digest = root.root;
  } else {
    result.model_digest = detail::lattice_global_blocks(
        m, [&](std::size_t i) { return whole.subspan(i * bs, bs); }, pool, result.memory);
  }
  return result;
}

/// Hashes the fragmented tensors where they are, through a block table. No
/// copies and no padding; final tensor blocks are hashed at their true length.
inline ModelDigestResult inplace_hash(const HashConfig& cfg, ModelView model, WorkPool& pool) {
  detail::require_hashable(model);
  const BlockTable table = build_block_table(model, cfg.block_size);
  auto block_at = [&](std::size_t i) {
    const BlockRow& row = table[i];
    return model[row.tensor].data.subspan(row.offset, row.length);
  };

  ModelDigestResult result{Digest{}, std::nullopt, cfg, table.size(), {}};
  result.memory.table_bytes = table.size() * sizeof(BlockRow);
  if (cfg.construction == Construction::kMerkle) {
    auto leaves = hash_blocks_with(
        cfg.alg, table.size(), [&](std::size_t i, Hasher& h) { h.update(block_at(i)); }, pool);
    result.memory.digest_bytes += leaves.storage_bytes();
    auto root = merkle_root_accounted(std::move(leaves), pool);
    result.memory.reduction_bytes = root.reduction_bytes;
    result.model_digest = root.root;
  } else {
    result.model_digest = detail::lattice_global_blocks(table.size(), block_at, pool, result.memory);
  }
  return result;
}

namespace detail {

inline std::uint64_t per_layer_block_count(ModelView model, std::size_t bs) {
  std::uint64_t n = 0;
  for (const auto& t : model) n += blocks_for(t.data.size(), bs);
  return n;
}

inline std::vector<LayerDigest> name_layers(ModelView model, std::vector<ModelDigest> digests) {
  std::vector<LayerDigest> out;
  out.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    out.push_back({std::string(model[i].name), std::move(digests[i])});
  }
  return out;
}

}  // namespace detail

/// Hashes each tensor into a layer digest (one task per layer), then reduces
/// the layer digests in entry order: a Merkle tree over them, or their
/// lattice sum. Returns both granularities.
inline ModelDigestResult per_layer_hash(const HashConfig& cfg, ModelView model, WorkPool& pool) {
  detail::require_hashable(model);
  const std::size_t bs = cfg.block_size;
  const std::size_t n = model.size();
  ModelDigestResult result{Digest{}, std::nullopt, cfg, detail::per_layer_block_count(model, bs), {}};
  std::mutex ledger_mutex;

  if (cfg.construction == Construction::kMerkle) {
    DigestBuffer layers(cfg.alg, n);
    layers.set_count(n);
    pool.parallel_for(n, [&](std::size_t i) {
      layers.put(i, detail::merkle_padded_tensor(cfg.alg, model[i].data, bs, pool, result.memory,
                                                 ledger_mutex));
    }, 1);
    std::vector<ModelDigest> named;
    named.reserve(n);
    for (std::size_t i = 0; i < n; ++i) named.emplace_back(layers.digest(i));
    result.memory.digest_bytes += layers.storage_bytes();
    auto root = merkle_root_accounted(std::move(layers), pool);
    result.memory.reduction_bytes += root.reduction_bytes;
    result.model_digest = root.root;
    result.layer_digests = detail::name_layers(model, std::move(named));
  } else {
    std::vector<LatticeDigest> layers(n);
    pool.parallel_for(n, [&](std::size_t i) {
      layers[i] = detail::lattice_tensor(i, model[i].data, bs, pool, result.memory, ledger_mutex);
    }, 1);
    result.memory.digest_bytes += n * sizeof(LatticeDigest);
    result.memory.reduction_bytes += detail::lattice_reduction_bytes(n);
    result.model_digest = lt_reduce(layers, pool);
    result.layer_digests =
        detail::name_layers(model, std::vector<ModelDigest>(layers.begin(), layers.end()));
  }
  return result;
}

/// Layer visit order for size-ordered scheduling: ascending size, ties kept
/// in entry order.
inline std::vector<std::size_t> order_layers_by_size(ModelView model) {
  std::vector<std::size_t> order(model.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model[a].data.size() < model[b].data.size();
  });
  return order;
}

/// Lattice per-layer with layers scheduled smallest first; each finished
/// layer digest is folded into a running sum as soon as it is ready.
/// Byte-identical to the unordered lattice per-layer result.
inline ModelDigestResult ordered_lattice_per_layer(const HashConfig& cfg, ModelView model,
                                                   WorkPool& pool) {
  if (cfg.construction != Construction::kLattice || cfg.strategy != Strategy::kPerLayer ||
      !cfg.ordered_per_layer) {
    throw ConfigError("ordered_lattice_per_layer needs lattice + per-layer + ordered");
  }
  detail::require_hashable(model);
  const std::size_t bs = cfg.block_size;
  const std::size_t n = model.size();
  const auto order = order_layers_by_size(model);

  ModelDigestResult result{Digest{}, std::nullopt, cfg, detail::per_layer_block_count(model, bs), {}};
  std::mutex ledger_mutex;
  std::mutex sum_mutex;
  std::vector<LatticeDigest> layers(n);
  LatticeDigest running = lt_zero();
  pool.parallel_for(n, [&](std::size_t pos) {
    const std::size_t i = order[pos];
    LatticeDigest d = detail::lattice_tensor(i, model[i].data, bs, pool, result.memory, ledger_mutex);
    layers[i] = d;
    std::lock_guard lock(sum_mutex);
    running += d;
  }, 1);
  result.memory.digest_bytes += n * sizeof(LatticeDigest);
  result.model_digest = running;
  result.layer_digests =
      detail::name_layers(model, std::vector<ModelDigest>(layers.begin(), layers.end()));
  return result;
}

/// Validates cfg and dispatches to the matching strategy.
inline ModelDigestResult hash_model(const HashConfig& cfg, ModelView model, WorkPool& pool) {
  cfg.validate();
  switch (cfg.strategy) {
    case Strategy::kCoalesced: return coalesce_hash(cfg, model, pool);
    case Strategy::kInPlace: return inplace_hash(cfg, model, pool);
    case Strategy::kPerLayer:
      return cfg.ordered_per_layer ? ordered_lattice_per_layer(cfg, model, pool)
                                   : per_layer_hash(cfg, model, pool);
  }
  throw ConfigError("unknown strategy");
}

inline ModelDigestResult hash_model(const HashConfig& cfg, const TensorMap& model, WorkPool& pool) {
  const auto views = model.views();
  return hash_model(cfg, views, pool);
}

}  // namespace sentinel
