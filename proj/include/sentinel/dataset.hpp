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

// Per-source dataset digests over shuffled batches.
//
// Every sample is lattice-hashed on its raw bytes, tagged with its stable
// sample id. Batches are split by provider, each provider's share is reduced
// to one batch digest, and that digest is added to the provider's running
// sum. Because lattice addition is associative and commutative, the final
// sums depend only on which samples were seen, not on shuffle order or batch
// boundaries.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentinel/lattice.hpp"
#include "sentinel/model_io.hpp"
#include "sentinel/synthetic.hpp"
#include "sentinel/work_pool.hpp"

namespace sentinel {

using SourceId = std::uint32_t;

struct SampleRecord {
  std::uint64_t sample_id = 0;
  SourceId source_id = 0;
  std::string label;
  Bytes data;
};

struct Batch {
  std::vector<SampleRecord> samples;
  std::size_t size() const noexcept { return samples.size(); }
};

struct SampleHashOptions {
  /// Extend the digest to LE64(sample_id) || label || data. Off by default.
  bool cover_labels = false;
};

inline LatticeDigest hash_sample(const SampleRecord& s, const SampleHashOptions& opts = {}) {
  if (!opts.cover_labels) return lt_hash_block(s.sample_id, s.data);
  Hasher& h = thread_hasher(CompressionAlg::kBlake2b);
  auto id = le64(s.sample_id);
  h.update(id).update(as_bytes(s.label)).update(s.data);
  return LatticeDigest::from_bytes(h.finish().bytes());
}

struct SourceDigest {
  LatticeDigest digest;
  std::uint64_t count = 0;

  friend bool operator==(const SourceDigest&, const SourceDigest&) = default;
};

// Running per-source sums. Declared sources start at lt_zero() with a count
// of zero.
class SourceAccumulator {
 public:
  SourceAccumulator() = default;

  explicit SourceAccumulator(const std::set<SourceId>& declared) {
    for (SourceId s : declared) entries_[s] = {};
  }

  bool declared(SourceId s) const { return entries_.contains(s); }

  void add(SourceId s, const LatticeDigest& d, std::uint64_t count) {
    auto& e = entries_.at(s);
    e.digest += d;
    e.count += count;
  }

  /// Merges another accumulator with the same declared sources.
  void merge(const SourceAccumulator& other) {
    for (const auto& [s, e] : other.entries_) add(s, e.digest, e.count);
  }

  const std::map<SourceId, SourceDigest>& entries() const noexcept { return entries_; }

 private:
  std::map<SourceId, SourceDigest> entries_;
};

/// Groups the batch by source, reduces each group to a batch digest and adds
/// it into the running sums. Every source is checked before anything is
/// added, so a rejected batch leaves acc unchanged.
inline void process_batch(const Batch& batch, SourceAccumulator& acc, WorkPool& pool,
                          const SampleHashOptions& opts = {}) {
  std::map<SourceId, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < batch.samples.size(); ++i) {
    const auto& s = batch.samples[i];
    if (!acc.declared(s.source_id)) {
      throw ValidationError("sample " + std::to_string(s.sample_id) + " has undeclared source " +
                            std::to_string(s.source_id));
    }
    groups[s.source_id].push_back(i);
  }
  std::vector<LatticeDigest> hashes(batch.samples.size());
  pool.parallel_for(batch.samples.size(), [&](std::size_t i) { hashes[i] = hash_sample(batch.samples[i], opts); });

  std::vector<LatticeDigest> group;
  for (const auto& [source, members] : groups) {
    group.clear();
    for (std::size_t i : members) group.push_back(hashes[i]);
    acc.add(source, lt_reduce(group, pool), members.size());
  }
}

inline std::map<SourceId, SourceDigest> finalize(const SourceAccumulator& acc) { return acc.entries(); }

// Dataset storage: raw shard plus a JSON manifest
//   {"data": "<path>", "sources": [ids...],
//    "samples": [{"id":..., "source":..., "label":"...", "offset":..., "length":...}],
//    "expected": {"<source>": "<128 hex>"}}      (expected is optional)
struct SampleEntry {
  std::uint64_t sample_id;
  SourceId source_id;
  std::string label;
  std::uint64_t offset;
  std::uint64_t length;
};

struct DatasetManifest {
  std::filesystem::path data_path;
  std::set<SourceId> sources;
  std::vector<SampleEntry> samples;
  std::map<SourceId, LatticeDigest> expected;
};

inline DatasetManifest load_dataset_manifest(const std::filesystem::path& path) {
  const nlohmann::json doc = detail::read_json(path);
  DatasetManifest m;
  try {
    m.data_path = path.parent_path() / doc.at("data").get<std::string>();
    for (const auto& s : doc.at("sources")) m.sources.insert(s.get<SourceId>());
    std::set<std::uint64_t> ids;
    for (const auto& s : doc.at("samples")) {
      SampleEntry e{s.at("id").get<std::uint64_t>(), s.at("source").get<SourceId>(),
                    s.value("label", std::string()), s.at("offset").get<std::uint64_t>(),
                    s.at("length").get<std::uint64_t>()};
      if (!ids.insert(e.sample_id).second) {
        throw FormatError("duplicate sample id " + std::to_string(e.sample_id));
      }
      m.samples.push_back(std::move(e));
    }
    if (doc.contains("expected")) {
      for (const auto& [k, v] : doc.at("expected").items()) {
        m.expected[static_cast<SourceId>(std::stoul(k))] = LatticeDigest::from_hex(v.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return m;
}

/// Reads the shard and checks that the samples tile it exactly: sorted by
/// offset they are contiguous from 0 to the end of the file.
inline std::vector<SampleRecord> load_samples(const DatasetManifest& m) {
  const Bytes shard = detail::read_file(m.data_path);
  std::vector<std::size_t> order(m.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m.samples[a].offset < m.samples[b].offset; });
  std::uint64_t cursor = 0;
  for (std::size_t i : order) {
    const auto& e = m.samples[i];
    if (e.offset != cursor) {
      throw FormatError("sample " + std::to_string(e.sample_id) + " does not tile the shard at offset " +
                        std::to_string(e.offset));
    }
    cursor += e.length;
  }
  if (cursor != shard.size()) {
    throw FormatError("samples cover " + std::to_string(cursor) + " bytes but the shard holds " +
                      std::to_string(shard.size()));
  }
  std::vector<SampleRecord> out;
  out.reserve(m.samples.size());
  for (const auto& e : m.samples) {
    auto first = shard.begin() + static_cast<std::ptrdiff_t>(e.offset);
    out.push_back({e.sample_id, e.source_id, e.label, Bytes(first, first + static_cast<std::ptrdiff_t>(e.length))});
  }
  return out;
}

inline void save_dataset(const std::vector<SampleRecord>& samples, const std::set<SourceId>& sources,
                         const std::filesystem::path& manifest_path, const std::string& data_name,
                         const std::map<SourceId, LatticeDigest>& expected = {}) {
  nlohmann::json entries = nlohmann::json::array();
  Bytes shard;
  for (const auto& s : samples) {
    entries.push_back({{"id", s.sample_id},
                       {"source", s.source_id},
                       {"label", s.label},
                       {"offset", shard.size()},
                       {"length", s.data.size()}});
    shard.insert(shard.end(), s.data.begin(), s.data.end());
  }
  detail::write_file(manifest_path.parent_path() / data_name, shard);
  nlohmann::json doc = {{"data", data_name}, {"sources", sources}, {"samples", entries}};
  if (!expected.empty()) {
    nlohmann::json exp = nlohmann::json::object();
    for (const auto& [s, d] : expected) exp[std::to_string(s)] = d.hex();
    doc["expected"] = exp;
  }
  detail::write_text(manifest_path, doc.dump(1) + "\n");
}

// Yields every sample exactly once, in a seed-determined order, in batches of
// at most batch_size.
class BatchIterator {
 public:
  BatchIterator(const std::vector<SampleRecord>& samples, std::size_t batch_size, std::uint64_t seed)
      : samples_(samples), batch_size_(batch_size), order_(samples.size()) {
    if (batch_size == 0) throw InvalidInput("batch size must be at least 1");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order_.begin(), order_.end(), rng);
  }

  std::optional<Batch> next() {
    if (cursor_ >= order_.size()) return std::nullopt;
    Batch b;
    const std::size_t end = std::min(order_.size(), cursor_ + batch_size_);
    b.samples.reserve(end - cursor_);
    for (; cursor_ < end; ++cursor_) b.samples.push_back(samples_[order_[cursor_]]);
    return b;
  }

 private:
  const std::vector<SampleRecord>& samples_;
  std::size_t batch_size_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

inline BatchIterator iterate_batches(const std::vector<SampleRecord>& samples, std::size_t batch_size,
                                     std::uint64_t shuffle_seed) {
  return BatchIterator(samples, batch_size, shuffle_seed);
}

/// Streams all samples through the pipeline and returns the final per-source
/// digests.
inline std::map<SourceId, SourceDigest> digest_dataset(const std::vector<SampleRecord>& samples,
                                                       const std::set<SourceId>& sources,
                                                       std::size_t batch_size, std::uint64_t seed,
                                                       WorkPool& pool, const SampleHashOptions& opts = {}) {
  SourceAccumulator acc(sources);
  auto it = iterate_batches(samples, batch_size, seed);
  while (auto batch = it.next()) process_batch(*batch, acc, pool, opts);
  return finalize(acc);
}

/// Seeded synthetic dataset. Each sample goes to a uniformly random source
/// and holds sample_size bytes (0 picks a random text-like length).
inline std::vector<SampleRecord> make_synthetic_dataset(std::size_t count, std::uint32_t sources,
                                                        std::size_t sample_size, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<SampleRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SampleRecord s;
    s.sample_id = i;
    s.source_id = static_cast<SourceId>(rng.below(sources));
    s.label = std::to_string(rng.below(10));
    s.data = rng.bytes(sample_size != 0 ? sample_size : 16 + rng.below(1024));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sentinel
