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

// Test-only oracles. Straight-line, single-threaded re-derivations of every
// construction that share nothing with the library beyond compress_block:
// Merkle levels are rebuilt by byte concatenation, lattice sums are done one
// 16-bit lane at a time on raw bytes.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sentinel/compression.hpp"
#include "sentinel/model.hpp"
#include "sentinel/synthetic.hpp"

namespace sentinel::testing {

using RawLattice = std::array<Byte, 64>;

inline RawLattice raw_add(const RawLattice& a, const RawLattice& b) {
  RawLattice out{};
  for (int i = 0; i < 32; ++i) {
    unsigned x = a[2 * i] | (a[2 * i + 1] << 8);
    unsigned y = b[2 * i] | (b[2 * i + 1] << 8);
    unsigned z = (x + y) & 0xFFFF;
    out[2 * i] = static_cast<Byte>(z);
    out[2 * i + 1] = static_cast<Byte>(z >> 8);
  }
  return out;
}

inline RawLattice raw_sub(const RawLattice& a, const RawLattice& b) {
  RawLattice out{};
  for (int i = 0; i < 32; ++i) {
    unsigned x = a[2 * i] | (a[2 * i + 1] << 8);
    unsigned y = b[2 * i] | (b[2 * i + 1] << 8);
    unsigned z = (x + 0x10000 - y) & 0xFFFF;
    out[2 * i] = static_cast<Byte>(z);
    out[2 * i + 1] = static_cast<Byte>(z >> 8);
  }
  return out;
}

inline RawLattice raw_of(const LatticeDigest& d) { return d.to_bytes(); }

inline Bytes cat(std::initializer_list<ByteView> parts) {
  Bytes out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline RawLattice raw_block_hash(std::initializer_list<std::uint64_t> tags, ByteView data) {
  Bytes msg;
  for (auto t : tags) {
    auto e = le64(t);
    msg.insert(msg.end(), e.begin(), e.end());
  }
  msg.insert(msg.end(), data.begin(), data.end());
  Digest d = compress_block(CompressionAlg::kBlake2b, ByteView(msg));
  RawLattice out{};
  std::copy(d.bytes().begin(), d.bytes().end(), out.begin());
  return out;
}

inline Digest ref_merkle_root(CompressionAlg alg, std::vector<Digest> level) {
  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(Digest::zero(alg));
    std::vector<Digest> next;
    for (std::size_t i = 0; i < level.size(); i += 2) {
      Bytes joined = cat({level[i].bytes(), level[i + 1].bytes()});
      next.push_back(compress_block(alg, ByteView(joined)));
    }
    level = std::move(next);
  }
  return level.at(0);
}

inline std::vector<Bytes> ref_split(ByteView data, std::size_t bs, bool pad) {
  std::vector<Bytes> out;
  for (std::size_t off = 0; off < data.size(); off += bs) {
    std::size_t len = std::min(bs, data.size() - off);
    Bytes b(data.begin() + off, data.begin() + off + len);
    if (pad) b.resize(bs, 0);
    out.push_back(std::move(b));
  }
  return out;
}

// Expected model digest (hex) and layer digests for one configuration.
struct RefResult {
  std::string model;
  std::vector<std::string> layers;
};

inline std::string raw_hex(const RawLattice& r) { return to_hex(r); }

inline RefResult reference_hash(const HashConfig& cfg, ModelView model) {
  const std::size_t bs = cfg.block_size;
  RefResult out;
  if (cfg.strategy == Strategy::kCoalesced || cfg.strategy == Strategy::kInPlace) {
    std::vector<Bytes> blocks;
    if (cfg.strategy == Strategy::kCoalesced) {
      Bytes all;
      for (const auto& t : model) all.insert(all.end(), t.data.begin(), t.data.end());
      blocks = ref_split(all, bs, true);
    } else {
      for (const auto& t : model) {
        for (auto& b : ref_split(t.data, bs, false)) blocks.push_back(std::move(b));
      }
    }
    if (cfg.construction == Construction::kMerkle) {
      std::vector<Digest> leaves;
      for (const auto& b : blocks) leaves.push_back(compress_block(cfg.alg, ByteView(b)));
      out.model = ref_merkle_root(cfg.alg, leaves).hex();
    } else {
      RawLattice acc{};
      for (std::size_t k = 0; k < blocks.size(); ++k) acc = raw_add(acc, raw_block_hash({k}, blocks[k]));
      out.model = raw_hex(acc);
    }
    return out;
  }
  if (cfg.construction == Construction::kMerkle) {
    std::vector<Digest> layer_digests;
    for (const auto& t : model) {
      if (t.data.empty()) {
        layer_digests.push_back(compress_block(cfg.alg, ByteView{}));
        continue;
      }
      std::vector<Digest> leaves;
      for (const auto& b : ref_split(t.data, bs, true)) leaves.push_back(compress_block(cfg.alg, ByteView(b)));
      layer_digests.push_back(ref_merkle_root(cfg.alg, leaves));
    }
    for (const auto& d : layer_digests) out.layers.push_back(d.hex());
    out.model = ref_merkle_root(cfg.alg, layer_digests).hex();
  } else {
    RawLattice total{};
    for (std::size_t i = 0; i < model.size(); ++i) {
      RawLattice layer{};
      auto blocks = ref_split(model[i].data, bs, false);
      for (std::size_t j = 0; j < blocks.size(); ++j) layer = raw_add(layer, raw_block_hash({i, j}, blocks[j]));
      out.layers.push_back(raw_hex(layer));
      total = raw_add(total, layer);
    }
    out.model = raw_hex(total);
  }
  return out;
}

/// Random model: `tensors` tensors with log-uniform sizes in [1, max_bytes].
inline TensorMap random_model(SplitMix64& rng, std::size_t tensors, std::size_t max_bytes) {
  TensorMap m;
  const double span = std::log2(static_cast<double>(max_bytes));
  for (std::size_t i = 0; i < tensors; ++i) {
    auto len = static_cast<std::size_t>(std::exp2(rng.unit() * span));
    len = std::clamp<std::size_t>(len, 1, max_bytes);
    m.add("t" + std::to_string(i), rng.bytes(len));
  }
  return m;
}

/// Random model whose tensor sizes are multiples of block_size.
inline TensorMap random_aligned_model(SplitMix64& rng, std::size_t tensors, std::size_t block_size,
                                      std::size_t max_blocks) {
  TensorMap m;
  for (std::size_t i = 0; i < tensors; ++i) {
    m.add("t" + std::to_string(i), rng.bytes(block_size * (1 + rng.below(max_blocks))));
  }
  return m;
}

/// The fixed model used for golden digests: seed 42, these sizes, tensors
/// filled in order from one SplitMix64 stream.
inline TensorMap golden_model() {
  SplitMix64 rng(42);
  TensorMap m;
  const std::size_t sizes[] = {3 * 8192 + 100, 5000, 0, 8192, 1};
  for (std::size_t i = 0; i < std::size(sizes); ++i) m.add("layer" + std::to_string(i), rng.bytes(sizes[i]));
  return m;
}

inline std::vector<HashConfig> all_configs(CompressionAlg merkle_alg, std::size_t bs = kDefaultModelBlockSize) {
  return {
      HashConfig::merkle(merkle_alg, Strategy::kCoalesced, bs),
      HashConfig::merkle(merkle_alg, Strategy::kPerLayer, bs),
      HashConfig::merkle(merkle_alg, Strategy::kInPlace, bs),
      HashConfig::lattice(Strategy::kCoalesced, false, bs),
      HashConfig::lattice(Strategy::kPerLayer, false, bs),
      HashConfig::lattice(Strategy::kPerLayer, true, bs),
      HashConfig::lattice(Strategy::kInPlace, false, bs),
  };
}

inline std::string describe(const HashConfig& cfg) {
  std::string s = std::string(construction_name(cfg.construction)) + "/" + std::string(alg_name(cfg.alg)) + "/" +
                  std::string(strategy_name(cfg.strategy));
  if (cfg.ordered_per_layer) s += "/ordered";
  return s + "/" + std::to_string(cfg.block_size);
}

}  // namespace sentinel::testing
