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

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sentinel/bytes.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

enum class CompressionAlg { kSha256, kBlake2b, kSha3_256 };

inline constexpr std::size_t kMaxDigestLength = 64;

constexpr std::size_t digest_length(CompressionAlg alg) {
  return alg == CompressionAlg::kBlake2b ? 64 : 32;
}

/// Name used in attestation predicates and digest maps.
constexpr std::string_view alg_name(CompressionAlg alg) {
  switch (alg) {
    case CompressionAlg::kSha256: return "sha256";
    case CompressionAlg::kBlake2b: return "blake2b";
    case CompressionAlg::kSha3_256: return "sha3-256";
  }
  return "";
}

inline std::optional<CompressionAlg> parse_alg(std::string_view name) {
  for (auto alg : {CompressionAlg::kSha256, CompressionAlg::kBlake2b, CompressionAlg::kSha3_256}) {
    if (alg_name(alg) == name) return alg;
  }
  return std::nullopt;
}

// A compression-function output tagged with its algorithm. Fixed inline
// storage; only the first digest_length(alg) bytes are meaningful.
class Digest {
 public:
  Digest() = default;

  Digest(CompressionAlg alg, ByteView bytes) : alg_(alg) {
    if (bytes.size() != digest_length(alg)) {
      throw InvalidInput("digest length " + std::to_string(bytes.size()) + " does not match " +
                         std::string(alg_name(alg)));
    }
    std::copy(bytes.begin(), bytes.end(), storage_.begin());
  }

  static Digest zero(CompressionAlg alg) {
    Digest d;
    d.alg_ = alg;
    return d;
  }

  static Digest from_hex(CompressionAlg alg, std::string_view hex) {
    Bytes raw = sentinel::from_hex(hex);
    if (raw.size() != digest_length(alg)) throw FormatError("digest hex has wrong length");
    return Digest(alg, raw);
  }

  CompressionAlg alg() const noexcept { return alg_; }
  std::size_t size() const noexcept { return digest_length(alg_); }
  ByteView bytes() const noexcept { return {storage_.data(), size()}; }
  std::string hex() const { return to_hex(bytes()); }

  friend bool operator==(const Digest& a, const Digest& b) {
    return a.alg_ == b.alg_ && std::equal(a.bytes().begin(), a.bytes().end(), b.bytes().begin());
  }

 private:
  friend class Hasher;

  CompressionAlg alg_ = CompressionAlg::kSha256;
  std::array<Byte, kMaxDigestLength> storage_{};
};

namespace detail {

struct MdFree {
  void operator()(EVP_MD* md) const { EVP_MD_free(md); }
};
struct MdCtxFree {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

// Explicitly fetched digest implementations. Passing the legacy EVP_sha256()
// style getters to EVP_DigestInit_ex re-fetches on every init.
inline const EVP_MD* fetch_md(CompressionAlg alg) {
  static const std::array<std::unique_ptr<EVP_MD, MdFree>, 3> kMds = [] {
    std::array<std::unique_ptr<EVP_MD, MdFree>, 3> mds;
    mds[0].reset(EVP_MD_fetch(nullptr, "SHA256", nullptr));
    mds[1].reset(EVP_MD_fetch(nullptr, "BLAKE2B-512", nullptr));
    mds[2].reset(EVP_MD_fetch(nullptr, "SHA3-256", nullptr));
    return mds;
  }();
  const EVP_MD* md = kMds[static_cast<std::size_t>(alg)].get();
  if (md == nullptr) throw ResourceError("OpenSSL digest unavailable: " + std::string(alg_name(alg)));
  return md;
}

}  // namespace detail

// Incremental hasher. Reusable: finish() leaves it ready for the next message.
class Hasher {
 public:
  explicit Hasher(CompressionAlg alg) : alg_(alg), ctx_(EVP_MD_CTX_new()) {
    if (!ctx_) throw ResourceError("EVP_MD_CTX_new failed");
    reset();
  }

  CompressionAlg alg() const noexcept { return alg_; }

  void reset() {
    if (EVP_DigestInit_ex2(ctx_.get(), detail::fetch_md(alg_), nullptr) != 1) {
      throw ResourceError("EVP_DigestInit_ex2 failed");
    }
  }

  Hasher& update(ByteView data) {
    if (!data.empty() && EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1) {
      throw ResourceError("EVP_DigestUpdate failed");
    }
    return *this;
  }

  /// Feeds n zero bytes.
  Hasher& update_zeros(std::size_t n) {
    static constexpr std::array<Byte, 4096> kZeros{};
    while (n > 0) {
      std::size_t take = std::min(n, kZeros.size());
      update({kZeros.data(), take});
      n -= take;
    }
    return *this;
  }

  Digest finish() {
    Digest out;
    out.alg_ = alg_;
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), out.storage_.data(), &len) != 1 || len != out.size()) {
      throw ResourceError("EVP_DigestFinal_ex failed");
    }
    reset();
    return out;
  }

 private:
  CompressionAlg alg_;
  std::unique_ptr<EVP_MD_CTX, detail::MdCtxFree> ctx_;
};

/// Per-thread reusable hasher for alg; avoids a context allocation per block.
inline Hasher& thread_hasher(CompressionAlg alg) {
  thread_local std::array<std::optional<Hasher>, 3> hashers;
  auto& slot = hashers[static_cast<std::size_t>(alg)];
  if (!slot) slot.emplace(alg);
  return *slot;
}

inline Digest compress_block(CompressionAlg alg, ByteView data) {
  return thread_hasher(alg).update(data).finish();
}

inline Digest compress_block(CompressionAlg alg, std::string_view data) {
  return compress_block(alg, as_bytes(data));
}

/// Whole-input hash of a stream, read in fixed chunks. Equal to
/// compress_block over the concatenated stream contents.
inline Digest sequential_hash(CompressionAlg alg, std::istream& in) {
  Hasher hasher(alg);
  std::array<char, 1 << 16> chunk;
  while (in) {
    in.read(chunk.data(), chunk.size());
    auto got = static_cast<std::size_t>(in.gcount());
    hasher.update({reinterpret_cast<const Byte*>(chunk.data()), got});
  }
  if (in.bad()) throw IoError("stream read failed");
  return hasher.finish();
}

/// Whole-input hash over a sequence of in-memory chunks.
template <typename Range>
Digest sequential_hash_chunks(CompressionAlg alg, const Range& chunks) {
  Hasher hasher(alg);
  for (const auto& c : chunks) hasher.update(ByteView(c));
  return hasher.finish();
}

}  // namespace sentinel
