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

// Signed attestations. An in-toto Statement lists subjects with their
// digests. The DSSE envelope carries the canonical statement bytes and
// signatures over their pre-authentication encoding. The bundle wraps the
// envelope together with the signer's public point.

#pragma once

#include <openssl/evp.h>

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sentinel/compression.hpp"
#include "sentinel/ecdsa.hpp"
#include "sentinel/lattice.hpp"

namespace sentinel {

inline constexpr std::string_view kStatementType = "https://in-toto.io/Statement/v1";
inline constexpr std::string_view kPredicateType = "https://sentinel.dev/attestation/ml-digest/v1";
inline constexpr std::string_view kPayloadType = "application/vnd.in-toto+json";
inline constexpr std::string_view kBundleMediaType = "application/vnd.sentinel.bundle+json;version=1";

/// Digest length in bytes for a digest-map key; 0 for unknown keys.
inline std::size_t digest_length_for(std::string_view key) {
  if (key == kLatticeDigestName) return kLatticeBytes;
  if (auto alg = parse_alg(key)) return digest_length(*alg);
  return 0;
}

struct Subject {
  std::string name;
  std::map<std::string, std::string> digest;  // algorithm -> lowercase hex
};

struct Statement {
  std::string type{kStatementType};
  std::vector<Subject> subjects;
  std::string predicate_type{kPredicateType};
  nlohmann::json predicate = nlohmann::json::object();

  void validate() const {
    if (subjects.empty()) throw FormatError("statement has no subjects");
    for (const auto& s : subjects) {
      if (s.digest.empty()) throw FormatError("subject " + s.name + " has no digests");
      for (const auto& [alg, hex] : s.digest) {
        const std::size_t want = digest_length_for(alg);
        if (want == 0) throw FormatError("unknown digest algorithm " + alg);
        if (from_hex(hex).size() != want) throw FormatError("digest for " + s.name + " has wrong length");
      }
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json subs = nlohmann::json::array();
    for (const auto& s : subjects) subs.push_back({{"name", s.name}, {"digest", s.digest}});
    return {{"_type", type}, {"subject", subs}, {"predicateType", predicate_type}, {"predicate", predicate}};
  }

  static Statement from_json(const nlohmann::json& j) {
    Statement st;
    try {
      st.type = j.at("_type").get<std::string>();
      for (const auto& s : j.at("subject")) {
        st.subjects.push_back({s.at("name").get<std::string>(),
                               s.at("digest").get<std::map<std::string, std::string>>()});
      }
      st.predicate_type = j.at("predicateType").get<std::string>();
      st.predicate = j.at("predicate");
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("statement: ") + e.what());
    }
    if (!st.predicate.is_object()) throw FormatError("statement predicate is not an object");
    st.validate();
    return st;
  }
};

namespace detail {
inline void require_canonical_values(const nlohmann::json& j) {
  if (j.is_number_float()) throw FormatError("floating-point values have no canonical form");
  if (j.is_structured()) {
    for (const auto& v : j) require_canonical_values(v);
  }
}
}  // namespace detail

/// Sorted keys, no insignificant whitespace, UTF-8 (invalid UTF-8 rejected).
inline std::string canonicalize_json(const nlohmann::json& j) {
  detail::require_canonical_values(j);
  try {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
}

inline std::string canonicalize(const Statement& stmt) {
  stmt.validate();
  return canonicalize_json(stmt.to_json());
}

inline std::string base64_encode(ByteView data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

/// Standard alphabet with padding; throws FormatError on anything else.
inline Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("base64 length is not a multiple of 4");
  for (char c : text) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '/' || c == '=')) {
      throw FormatError("invalid base64 character");
    }
  }
  Bytes out(3 * (text.size() / 4));
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw FormatError("invalid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

/// DSSE v1 pre-authentication encoding:
///   "DSSEv1" SP LEN(type) SP type SP LEN(body) SP body
inline Bytes pae(std::string_view payload_type, ByteView payload) {
  std::string head = "DSSEv1 " + std::to_string(payload_type.size()) + " " + std::string(payload_type) + " " +
                     std::to_string(payload.size()) + " ";
  Bytes out(head.begin(), head.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

struct Signature {
  std::string keyid;
  Bytes sig;  // DER ECDSA
};

struct Envelope {
  std::string payload_type{kPayloadType};
  Bytes payload;
  std::vector<Signature> signatures;
};

struct Bundle {
  std::string media_type{kBundleMediaType};
  std::string public_key_hex;  // uncompressed SEC1 point
  Envelope envelope;

  nlohmann::json to_json() const {
    nlohmann::json sigs = nlohmann::json::array();
    for (const auto& s : envelope.signatures) sigs.push_back({{"keyid", s.keyid}, {"sig", base64_encode(s.sig)}});
    return {{"mediaType", media_type},
            {"verificationMaterial", {{"publicKey", {{"hex", public_key_hex}}}}},
            {"dsseEnvelope",
             {{"payload", base64_encode(envelope.payload)},
              {"payloadType", envelope.payload_type},
              {"signatures", sigs}}}};
  }

  std::string to_text() const { return to_json().dump(2) + "\n"; }

  /// Structural parse only; signatures are not checked here.
  static Bundle from_json(const nlohmann::json& j) {
    Bundle b;
    try {
      b.media_type = j.at("mediaType").get<std::string>();
      b.public_key_hex = j.at("verificationMaterial").at("publicKey").at("hex").get<std::string>();
      const auto& env = j.at("dsseEnvelope");
      b.envelope.payload = base64_decode(env.at("payload").get<std::string>());
      b.envelope.payload_type = env.at("payloadType").get<std::string>();
      for (const auto& s : env.at("signatures")) {
        b.envelope.signatures.push_back({s.value("keyid", std::string()), base64_decode(s.at("sig").get<std::string>())});
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bundle: ") + e.what());
    }
    return b;
  }

  static Bundle from_text(std::string_view text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bundle: ") + e.what());
    }
    return from_json(j);
  }
};

/// Short identifier of a signing key: first 16 bytes of SHA-256(point), hex.
inline std::string key_id(const PublicKey& key) {
  Bytes point = key.point();
  return compress_block(CompressionAlg::kSha256, ByteView(point)).hex().substr(0, 32);
}

inline Bundle sign_bundle(const Statement& stmt, const KeyPair& key) {
  Bundle b;
  const std::string body = canonicalize(stmt);
  b.envelope.payload.assign(body.begin(), body.end());
  const Digest d = compress_block(CompressionAlg::kSha256, ByteView(pae(b.envelope.payload_type, b.envelope.payload)));
  const PublicKey pub = key.public_key();
  b.public_key_hex = pub.point_hex();
  b.envelope.signatures.push_back({key_id(pub), key.sign_digest(d.bytes())});
  return b;
}

enum class Verdict { kOk, kSignatureInvalid, kDigestMismatch, kMalformed };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kOk: return "OK";
    case Verdict::kSignatureInvalid: return "SIGNATURE_INVALID";
    case Verdict::kDigestMismatch: return "DIGEST_MISMATCH";
    case Verdict::kMalformed: return "MALFORMED";
  }
  return "?";
}

/// Envelope-level check, done before the payload is parsed: MALFORMED when
/// the envelope or verification material is unusable, SIGNATURE_INVALID
/// when no signature verifies over the PAE digest (or the embedded key is
/// not the trusted one), otherwise OK.
inline Verdict check_signature(const Bundle& b, const std::optional<PublicKey>& trusted = std::nullopt) {
  if (b.media_type != kBundleMediaType || b.envelope.payload_type != kPayloadType || b.envelope.signatures.empty()) {
    return Verdict::kMalformed;
  }
  std::optional<PublicKey> embedded;
  try {
    embedded = PublicKey::from_point_hex(b.public_key_hex);
  } catch (const Error&) {
    return Verdict::kMalformed;
  }
  if (trusted && !(*trusted == *embedded)) return Verdict::kSignatureInvalid;
  const Digest d = compress_block(CompressionAlg::kSha256, ByteView(pae(b.envelope.payload_type, b.envelope.payload)));
  for (const auto& s : b.envelope.signatures) {
    if (embedded->verify_digest(d.bytes(), s.sig)) return Verdict::kOk;
  }
  return Verdict::kSignatureInvalid;
}

/// Parses the signed payload. Call only after check_signature returned OK.
inline Statement open_statement(const Bundle& b) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(b.envelope.payload.begin(), b.envelope.payload.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("payload: ") + e.what());
  }
  return Statement::from_json(j);
}

struct DigestClaim {
  std::string algorithm;
  std::string hex;
};

/// Full verification. Precedence: MALFORMED, SIGNATURE_INVALID,
/// DIGEST_MISMATCH, OK. Every subject must be present in `recomputed` with
/// an equal digest under the subject's algorithm.
inline Verdict verify_bundle(const Bundle& b, const std::map<std::string, DigestClaim>& recomputed,
                             const std::optional<PublicKey>& trusted = std::nullopt) {
  if (Verdict v = check_signature(b, trusted); v != Verdict::kOk) return v;
  Statement stmt;
  try {
    stmt = open_statement(b);
  } catch (const Error&) {
    return Verdict::kMalformed;
  }
  if (stmt.type != kStatementType || stmt.predicate_type != kPredicateType) return Verdict::kMalformed;
  for (const auto& s : stmt.subjects) {
    auto it = recomputed.find(s.name);
    if (it == recomputed.end()) return Verdict::kDigestMismatch;
    auto d = s.digest.find(it->second.algorithm);
    if (d == s.digest.end() || d->second != it->second.hex) return Verdict::kDigestMismatch;
  }
  return Verdict::kOk;
}

inline Verdict verify_bundle_text(std::string_view text, const std::map<std::string, DigestClaim>& recomputed,
                                  const std::optional<PublicKey>& trusted = std::nullopt) {
  Bundle b;
  try {
    b = Bundle::from_text(text);
  } catch (const Error&) {
    return Verdict::kMalformed;
  }
  return verify_bundle(b, recomputed, trusted);
}

}  // namespace sentinel
