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

// Predicates record every parameter needed to recompute a digest, so a
// verifier replays exactly what the signer ran.

#pragma once

#include <string>

#include "sentinel/attestation.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/model.hpp"

namespace sentinel {

inline constexpr std::string_view kSampleIndexEncoding = "le64-prefix:sample_id";
inline constexpr std::string_view kPerSampleStrategy = "per-sample";

inline nlohmann::json model_predicate(const ModelDigestResult& r) {
  const HashConfig& cfg = r.config;
  nlohmann::json p = {
      {"artifact", "model"},
      {"construction", construction_name(cfg.construction)},
      {"compression", alg_name(cfg.alg)},
      {"strategy", strategy_name(cfg.strategy)},
      {"block_size", cfg.block_size},
      {"index_encoding", kIndexEncoding},
      {"ordered_per_layer", cfg.ordered_per_layer},
      {"label_coverage", false},
      {"block_count", r.block_count},
  };
  if (r.layer_digests) {
    nlohmann::json layers = nlohmann::json::object();
    for (const auto& l : *r.layer_digests) layers[l.name] = digest_hex(l.digest);
    p["layer_digests"] = layers;
  }
  return p;
}

inline Statement model_statement(const std::string& subject_name, const ModelDigestResult& r) {
  Statement st;
  st.subjects.push_back({subject_name, {{digest_key(r.model_digest), digest_hex(r.model_digest)}}});
  st.predicate = model_predicate(r);
  return st;
}

/// Rebuilds the hashing configuration from a model predicate.
inline HashConfig config_from_predicate(const nlohmann::json& p) {
  HashConfig cfg;
  try {
    if (p.value("artifact", std::string("model")) != "model") throw FormatError("predicate is not for a model");
    auto construction = parse_construction(p.at("construction").get<std::string>());
    auto alg = parse_alg(p.at("compression").get<std::string>());
    auto strategy = parse_strategy(p.at("strategy").get<std::string>());
    if (!construction || !alg || !strategy) throw FormatError("predicate names an unknown hashing parameter");
    if (p.at("index_encoding").get<std::string>() != kIndexEncoding) {
      throw FormatError("unsupported index encoding");
    }
    cfg.construction = *construction;
    cfg.alg = *alg;
    cfg.strategy = *strategy;
    cfg.block_size = p.at("block_size").get<std::size_t>();
    cfg.ordered_per_layer = p.value("ordered_per_layer", false);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("predicate: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("predicate: ") + e.what());
  }
  return cfg;
}

inline Statement dataset_statement(const std::string& subject_name, SourceId source, const SourceDigest& d,
                                   const SampleHashOptions& opts) {
  Statement st;
  st.subjects.push_back({subject_name, {{std::string(kLatticeDigestName), d.digest.hex()}}});
  st.predicate = {
      {"artifact", "dataset"},
      {"construction", "lattice"},
      {"compression", alg_name(CompressionAlg::kBlake2b)},
      {"strategy", kPerSampleStrategy},
      {"block_size", 0},
      {"index_encoding", kSampleIndexEncoding},
      {"label_coverage", opts.cover_labels},
      {"source_id", source},
      {"sample_count", d.count},
  };
  return st;
}

struct DatasetPredicate {
  SourceId source;
  std::uint64_t sample_count;
  SampleHashOptions options;
};

inline DatasetPredicate dataset_predicate(const nlohmann::json& p) {
  try {
    if (p.at("artifact").get<std::string>() != "dataset" ||
        p.at("index_encoding").get<std::string>() != kSampleIndexEncoding ||
        p.at("construction").get<std::string>() != "lattice") {
      throw FormatError("predicate is not a per-sample lattice dataset predicate");
    }
    return {p.at("source_id").get<SourceId>(), p.at("sample_count").get<std::uint64_t>(),
            SampleHashOptions{p.at("label_coverage").get<bool>()}};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("predicate: ") + e.what());
  }
}

}  // namespace sentinel
