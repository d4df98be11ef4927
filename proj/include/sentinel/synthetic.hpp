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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/model.hpp"

namespace sentinel {

// SplitMix64; small, seedable and trivially reproducible in other languages.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : (*this)() % bound; }

  double unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Fills with successive little-endian words, truncating the last one.
  void fill(std::span<Byte> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t w = (*this)();
      for (int b = 0; b < 8 && i < out.size(); ++b, ++i) out[i] = static_cast<Byte>(w >> (8 * b));
    }
  }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
  }

 private:
  std::uint64_t state_;
};

// Layer count and size (MiB) of a reference architecture.
struct ModelShape {
  std::string_view name;
  std::size_t layers;
  double size_mib;
};

inline constexpr std::array<ModelShape, 5> kModelShapes = {{
    {"resnet152", 932, 270},
    {"bert", 199, 538},
    {"gpt2", 149, 1077},
    {"vgg19", 38, 1077},
    {"gpt2-xl", 581, 8623},
}};

inline std::optional<ModelShape> find_shape(std::string_view name) {
  for (const auto& s : kModelShapes) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

/// Tensor sizes for `layers` layers totalling about total_bytes. Sizes follow
/// a heavy-tailed spread (a few large weight matrices, many small bias and
/// norm vectors) and are rounded to whole float32 elements.
inline std::vector<std::size_t> synthetic_layer_sizes(std::size_t layers, std::uint64_t total_bytes,
                                                      std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> weights(layers);
  double sum = 0;
  for (auto& w : weights) {
    w = std::exp2(rng.unit() * 12.0);
    sum += w;
  }
  std::vector<std::size_t> sizes(layers);
  for (std::size_t i = 0; i < layers; ++i) {
    auto bytes = static_cast<std::uint64_t>(static_cast<double>(total_bytes) * weights[i] / sum);
    sizes[i] = std::max<std::size_t>(4, bytes / 4 * 4);
  }
  return sizes;
}

/// Fills one tensor per entry of `sizes` with seeded pseudo-random bytes.
inline TensorMap make_model_from_sizes(std::string_view prefix, std::span<const std::size_t> sizes,
                                       std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0x5EED5EED5EED5EEDull);
  TensorMap model;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    model.add(std::string(prefix) + "layer" + std::to_string(i), rng.bytes(sizes[i]));
  }
  return model;
}

/// Model with explicit layer count and approximate total size.
inline TensorMap make_synthetic_model(std::size_t layers, std::uint64_t total_bytes, std::uint64_t seed) {
  const auto sizes = synthetic_layer_sizes(layers, total_bytes, seed);
  return make_model_from_sizes("", sizes, seed);
}

/// Model with the layer count of `shape` and its size multiplied by `scale`.
inline TensorMap make_synthetic_model(const ModelShape& shape, double scale, std::uint64_t seed) {
  const auto total = static_cast<std::uint64_t>(shape.size_mib * scale * 1024.0 * 1024.0);
  const auto sizes = synthetic_layer_sizes(shape.layers, total, seed);
  return make_model_from_sizes(std::string(shape.name) + ".", sizes, seed);
}

}  // namespace sentinel
