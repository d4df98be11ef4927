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

// ECDSA over P-256 with SHA-256 message digests.
//
// Signing derives the nonce deterministically (RFC 6979, HMAC-SHA256) and
// computes (r, s) directly on OpenSSL's group arithmetic; the OpenSSL 3.0
// signer has no deterministic mode. Verification uses the stock EVP verifier
// and therefore accepts any valid signature, deterministic or not.

#pragma once

#include <openssl/bio.h>
#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>
#include <openssl/pem.h>

#include <array>
#include <memory>
#include <string>

#include "sentinel/bytes.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

namespace ossl {

template <auto Fn>
struct Deleter {
  template <typename T>
  void operator()(T* p) const { Fn(p); }
};

using PKey = std::unique_ptr<EVP_PKEY, Deleter<EVP_PKEY_free>>;
using PKeyCtx = std::unique_ptr<EVP_PKEY_CTX, Deleter<EVP_PKEY_CTX_free>>;
using Bn = std::unique_ptr<BIGNUM, Deleter<BN_clear_free>>;
using BnCtx = std::unique_ptr<BN_CTX, Deleter<BN_CTX_free>>;
using Group = std::unique_ptr<EC_GROUP, Deleter<EC_GROUP_free>>;
using Point = std::unique_ptr<EC_POINT, Deleter<EC_POINT_free>>;
using Sig = std::unique_ptr<ECDSA_SIG, Deleter<ECDSA_SIG_free>>;
using Bio = std::unique_ptr<BIO, Deleter<BIO_free_all>>;
using ParamBld = std::unique_ptr<OSSL_PARAM_BLD, Deleter<OSSL_PARAM_BLD_free>>;
using Params = std::unique_ptr<OSSL_PARAM, Deleter<OSSL_PARAM_free>>;

template <typename P>
P check(P p, const char* what) {
  if (!p) throw KeyError(what);
  return p;
}

inline Group p256() { return check(Group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)), "P-256 group"); }

inline Bn bn_from(ByteView be) {
  return check(Bn(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr)), "BN_bin2bn");
}

inline std::array<Byte, 32> bn_to32(const BIGNUM* v) {
  std::array<Byte, 32> out{};
  if (BN_bn2binpad(v, out.data(), 32) != 32) throw KeyError("scalar wider than 32 bytes");
  return out;
}

inline std::string bio_string(BIO* bio) {
  char* data = nullptr;
  long len = BIO_get_mem_data(bio, &data);
  return std::string(data, static_cast<std::size_t>(len));
}

inline PKey pkey_from_params(const char* selection_name, int selection, OSSL_PARAM_BLD* bld) {
  Params params(OSSL_PARAM_BLD_to_param(bld));
  PKeyCtx ctx(EVP_PKEY_CTX_new_from_name(nullptr, selection_name, nullptr));
  EVP_PKEY* raw = nullptr;
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, selection, params.get()) != 1) {
    throw KeyError("EVP_PKEY_fromdata failed");
  }
  return PKey(raw);
}

inline void require_p256(EVP_PKEY* pkey) {
  char group[64] = {};
  std::size_t len = 0;
  if (!EVP_PKEY_is_a(pkey, "EC") ||
      EVP_PKEY_get_utf8_string_param(pkey, OSSL_PKEY_PARAM_GROUP_NAME, group, sizeof(group), &len) != 1 ||
      std::string(group, len) != "prime256v1") {
    throw KeyError("key is not an EC P-256 key");
  }
}

// Uncompressed SEC1 encoding of the key's public point.
inline Bytes public_point(EVP_PKEY* pkey) {
  std::array<Byte, 133> buf{};
  std::size_t len = 0;
  if (EVP_PKEY_get_octet_string_param(pkey, OSSL_PKEY_PARAM_PUB_KEY, buf.data(), buf.size(), &len) != 1) {
    throw KeyError("cannot read public point");
  }
  auto group = p256();
  Point point(EC_POINT_new(group.get()));
  BnCtx ctx(BN_CTX_new());
  if (!point || EC_POINT_oct2point(group.get(), point.get(), buf.data(), len, ctx.get()) != 1) {
    throw KeyError("invalid public point");
  }
  Bytes out(65);
  if (EC_POINT_point2oct(group.get(), point.get(), POINT_CONVERSION_UNCOMPRESSED, out.data(), out.size(),
                         ctx.get()) != 65) {
    throw KeyError("cannot encode public point");
  }
  return out;
}

}  // namespace ossl

// Deterministic nonce stream of RFC 6979 section 3.2 for a 256-bit order and
// HMAC-SHA256 (qlen == hlen, so bits2int is a plain big-endian read).
class Rfc6979Nonce {
 public:
  Rfc6979Nonce(const BIGNUM* priv, ByteView digest32, const BIGNUM* order) : order_(order) {
    if (digest32.size() != 32) throw InvalidInput("RFC 6979 nonce needs a 32-byte digest");
    auto x = ossl::bn_to32(priv);
    // bits2octets: reduce the digest modulo the order.
    ossl::Bn h = ossl::bn_from(digest32);
    if (BN_cmp(h.get(), order_) >= 0) BN_sub(h.get(), h.get(), order_);
    auto h1 = ossl::bn_to32(h.get());

    v_.fill(0x01);
    k_.fill(0x00);
    for (Byte round : {Byte{0x00}, Byte{0x01}}) {
      Bytes msg(v_.begin(), v_.end());
      msg.push_back(round);
      msg.insert(msg.end(), x.begin(), x.end());
      msg.insert(msg.end(), h1.begin(), h1.end());
      k_ = hmac(k_, msg);
      v_ = hmac(k_, v_);
    }
  }

  /// Next candidate k in [1, order).
  ossl::Bn next() {
    for (;;) {
      if (started_) {
        Bytes msg(v_.begin(), v_.end());
        msg.push_back(0x00);
        k_ = hmac(k_, msg);
        v_ = hmac(k_, v_);
      }
      started_ = true;
      v_ = hmac(k_, v_);
      ossl::Bn k = ossl::bn_from(v_);
      if (!BN_is_zero(k.get()) && BN_cmp(k.get(), order_) < 0) return k;
    }
  }

 private:
  static std::array<Byte, 32> hmac(const std::array<Byte, 32>& key, ByteView msg) {
    std::array<Byte, 32> out{};
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(), out.data(), &len) ==
            nullptr ||
        len != 32) {
      throw KeyError("HMAC-SHA256 failed");
    }
    return out;
  }

  const BIGNUM* order_;
  std::array<Byte, 32> v_{};
  std::array<Byte, 32> k_{};
  bool started_ = false;
};

class PublicKey {
 public:
  static PublicKey from_pem(const std::string& pem) {
    ossl::Bio bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
    ossl::PKey key(PEM_read_bio_PUBKEY(bio.get(), nullptr, nullptr, nullptr));
    if (!key) throw KeyError("not a PEM SubjectPublicKeyInfo");
    ossl::require_p256(key.get());
    return PublicKey(std::move(key));
  }

  /// From an uncompressed (or compressed) SEC1 point; rejects points not on
  /// the curve.
  static PublicKey from_point(ByteView sec1) {
    auto group = ossl::p256();
    ossl::Point point(EC_POINT_new(group.get()));
    ossl::BnCtx ctx(BN_CTX_new());
    if (!point || sec1.empty() ||
        EC_POINT_oct2point(group.get(), point.get(), sec1.data(), sec1.size(), ctx.get()) != 1) {
      throw KeyError("invalid P-256 point");
    }
    ossl::ParamBld bld(OSSL_PARAM_BLD_new());
    if (!bld || OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0) != 1 ||
        OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, sec1.data(), sec1.size()) != 1) {
      throw KeyError("OSSL_PARAM_BLD failed");
    }
    return PublicKey(ossl::pkey_from_params("EC", EVP_PKEY_PUBLIC_KEY, bld.get()));
  }

  static PublicKey from_point_hex(std::string_view hex) { return from_point(from_hex(hex)); }

  std::string to_pem() const {
    ossl::Bio bio(BIO_new(BIO_s_mem()));
    if (!bio || PEM_write_bio_PUBKEY(bio.get(), key_.get()) != 1) throw KeyError("PEM_write_bio_PUBKEY failed");
    return ossl::bio_string(bio.get());
  }

  Bytes point() const { return ossl::public_point(key_.get()); }
  std::string point_hex() const { return to_hex(point()); }

  /// Checks a DER signature over a 32-byte digest. Malformed DER is simply
  /// an invalid signature.
  bool verify_digest(ByteView digest32, ByteView der) const {
    ossl::PKeyCtx ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, key_.get(), nullptr));
    if (!ctx || EVP_PKEY_verify_init(ctx.get()) != 1) throw KeyError("EVP_PKEY_verify_init failed");
    return EVP_PKEY_verify(ctx.get(), der.data(), der.size(), digest32.data(), digest32.size()) == 1;
  }

  friend bool operator==(const PublicKey& a, const PublicKey& b) { return a.point() == b.point(); }

 private:
  explicit PublicKey(ossl::PKey key) : key_(std::move(key)) {}

  ossl::PKey key_;
};

class KeyPair {
 public:
  static KeyPair generate() {
    ossl::PKey key(EVP_PKEY_Q_keygen(nullptr, nullptr, "EC", "P-256"));
    if (!key) throw KeyError("P-256 key generation failed");
    return KeyPair(std::move(key));
  }

  /// PKCS#8 PEM, unencrypted.
  static KeyPair from_pem(const std::string& pem) {
    ossl::Bio bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
    ossl::PKey key(PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr));
    if (!key) throw KeyError("not a PEM private key");
    ossl::require_p256(key.get());
    return KeyPair(std::move(key));
  }

  /// From a big-endian scalar in [1, n-1]; the public point is derived.
  static KeyPair from_scalar(ByteView scalar_be) {
    auto group = ossl::p256();
    ossl::Bn d = ossl::bn_from(scalar_be);
    if (BN_is_zero(d.get()) || BN_cmp(d.get(), EC_GROUP_get0_order(group.get())) >= 0) {
      throw KeyError("private scalar out of range");
    }
    ossl::Point pub(EC_POINT_new(group.get()));
    ossl::BnCtx ctx(BN_CTX_new());
    if (!pub || EC_POINT_mul(group.get(), pub.get(), d.get(), nullptr, nullptr, ctx.get()) != 1) {
      throw KeyError("EC_POINT_mul failed");
    }
    Bytes point(65);
    EC_POINT_point2oct(group.get(), pub.get(), POINT_CONVERSION_UNCOMPRESSED, point.data(), point.size(), ctx.get());
    ossl::ParamBld bld(OSSL_PARAM_BLD_new());
    if (!bld || OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0) != 1 ||
        OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, point.data(), point.size()) != 1 ||
        OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, d.get()) != 1) {
      throw KeyError("OSSL_PARAM_BLD failed");
    }
    return KeyPair(ossl::pkey_from_params("EC", EVP_PKEY_KEYPAIR, bld.get()));
  }

  std::string private_pem() const {
    ossl::Bio bio(BIO_new(BIO_s_mem()));
    if (!bio || PEM_write_bio_PrivateKey(bio.get(), key_.get(), nullptr, nullptr, 0, nullptr, nullptr) != 1) {
      throw KeyError("PEM_write_bio_PrivateKey failed");
    }
    return ossl::bio_string(bio.get());
  }

  PublicKey public_key() const { return PublicKey::from_point(ossl::public_point(key_.get())); }

  std::array<Byte, 32> private_scalar() const { return ossl::bn_to32(scalar().get()); }

  /// Deterministic ECDSA signature over a 32-byte digest, DER encoded.
  Bytes sign_digest(ByteView digest32) const {
    if (digest32.size() != 32) throw InvalidInput("ECDSA P-256 signs 32-byte digests");
    auto group = ossl::p256();
    const BIGNUM* order = EC_GROUP_get0_order(group.get());
    ossl::Bn d = scalar();
    ossl::BnCtx ctx(BN_CTX_new());
    ossl::Bn e = ossl::bn_from(digest32);
    Rfc6979Nonce nonces(d.get(), digest32, order);
    for (;;) {
      ossl::Bn k = nonces.next();
      ossl::Point kg(EC_POINT_new(group.get()));
      ossl::Bn x(BN_new()), r(BN_new()), s(BN_new()), kinv(BN_new()), rd(BN_new());
      if (!kg || !x || !r || !s || !kinv || !rd ||
          EC_POINT_mul(group.get(), kg.get(), k.get(), nullptr, nullptr, ctx.get()) != 1 ||
          EC_POINT_get_affine_coordinates(group.get(), kg.get(), x.get(), nullptr, ctx.get()) != 1 ||
          BN_nnmod(r.get(), x.get(), order, ctx.get()) != 1) {
        throw KeyError("ECDSA nonce point failed");
      }
      if (BN_is_zero(r.get())) continue;
      // s = k^-1 (e + r d) mod n
      if (BN_mod_inverse(kinv.get(), k.get(), order, ctx.get()) == nullptr ||
          BN_mod_mul(rd.get(), r.get(), d.get(), order, ctx.get()) != 1 ||
          BN_mod_add(s.get(), e.get(), rd.get(), order, ctx.get()) != 1 ||
          BN_mod_mul(s.get(), s.get(), kinv.get(), order, ctx.get()) != 1) {
        throw KeyError("ECDSA scalar arithmetic failed");
      }
      if (BN_is_zero(s.get())) continue;
      ossl::Sig sig(ECDSA_SIG_new());
      if (!sig || ECDSA_SIG_set0(sig.get(), r.release(), s.release()) != 1) throw KeyError("ECDSA_SIG_set0 failed");
      unsigned char* der = nullptr;
      int len = i2d_ECDSA_SIG(sig.get(), &der);
      if (len <= 0) throw KeyError("i2d_ECDSA_SIG failed");
      Bytes out(der, der + len);
      OPENSSL_free(der);
      return out;
    }
  }

 private:
  explicit KeyPair(ossl::PKey key) : key_(std::move(key)) {}

  ossl::Bn scalar() const {
    BIGNUM* raw = nullptr;
    if (EVP_PKEY_get_bn_param(key_.get(), OSSL_PKEY_PARAM_PRIV_KEY, &raw) != 1) {
      throw KeyError("cannot read private scalar");
    }
    return ossl::Bn(raw);
  }

  ossl::PKey key_;
};

}  // namespace sentinel
