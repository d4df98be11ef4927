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


#include <gtest/gtest.h>
#include <openssl/ecdsa.h>

#include <string>

#include "sentinel/attestation.hpp"
#include "sentinel/predicate.hpp"
#include "support/golden_vectors.hpp"
#include "support/reference.hpp"

namespace sentinel {
namespace {

Statement fixture_statement() {
  Statement st;
  st.subjects.push_back({"model", {{"sha256", std::string(64, '0')}}});
  st.predicate = {{"construction", "merkle"}, {"compression", "sha256"},        {"strategy", "in-place"},
                  {"block_size", 8192},       {"index_encoding", "le64-prefix"}, {"label_coverage", false}};
  return st;
}

std::pair<std::string, std::string> decode_rs(ByteView der) {
  const unsigned char* p = der.data();
  ECDSA_SIG* sig = d2i_ECDSA_SIG(nullptr, &p, static_cast<long>(der.size()));
  EXPECT_NE(sig, nullptr);
  const BIGNUM *r = nullptr, *s = nullptr;
  ECDSA_SIG_get0(sig, &r, &s);
  auto out = std::make_pair(to_hex(ossl::bn_to32(r)), to_hex(ossl::bn_to32(s)));
  ECDSA_SIG_free(sig);
  return out;
}

const KeyPair& fixed_key() {
  static const KeyPair key = KeyPair::from_scalar(from_hex(golden::kRfc6979Key));
  return key;
}

std::map<std::string, DigestClaim> fixture_claims() {
  return {{"model", {"sha256", std::string(64, '0')}}};
}

TEST(AttestationTest, Rfc6979Vector) {
  const Digest d = compress_block(CompressionAlg::kSha256, "sample");
  const Bytes der = fixed_key().sign_digest(d.bytes());
  auto [r, s] = decode_rs(der);
  EXPECT_EQ(r, golden::kRfc6979R);
  EXPECT_EQ(s, golden::kRfc6979S);
  EXPECT_EQ(fixed_key().sign_digest(d.bytes()), der);
  EXPECT_TRUE(fixed_key().public_key().verify_digest(d.bytes(), der));
}

TEST(AttestationTest, GeneratedKeysSignAndVerify) {
  const KeyPair key = KeyPair::generate();
  const PublicKey pub = key.public_key();
  for (int i = 0; i < 20; ++i) {
    const Digest d = compress_block(CompressionAlg::kSha256, std::to_string(i));
    Bytes sig = key.sign_digest(d.bytes());
    ASSERT_TRUE(pub.verify_digest(d.bytes(), sig));
    const Digest other = compress_block(CompressionAlg::kSha256, std::to_string(i + 1000));
    ASSERT_FALSE(pub.verify_digest(other.bytes(), sig));
  }
}

TEST(AttestationTest, KeyPemRoundTrip) {
  const KeyPair key = KeyPair::generate();
  const KeyPair again = KeyPair::from_pem(key.private_pem());
  EXPECT_EQ(again.private_scalar(), key.private_scalar());
  EXPECT_EQ(PublicKey::from_pem(key.public_key().to_pem()), key.public_key());
  EXPECT_EQ(key.public_key().point().size(), 65u);
  EXPECT_THROW(KeyPair::from_pem("nonsense"), KeyError);
  EXPECT_THROW(PublicKey::from_point_hex("04" + std::string(128, '1')), KeyError);
  EXPECT_THROW(KeyPair::from_scalar(Bytes(32, 0)), KeyError);
}

TEST(AttestationTest, CanonicalForm) {
  EXPECT_EQ(canonicalize(fixture_statement()), golden::kCanonicalStatement);
  const std::string body(golden::kCanonicalStatement);
  EXPECT_EQ(compress_block(CompressionAlg::kSha256, ByteView(pae(kPayloadType, as_bytes(body)))).hex(),
            golden::kCanonicalPaeSha256);
  // Key order in the source object does not matter.
  auto j = nlohmann::json::parse(R"({"b":1,"a":{"z":[1,2],"y":"é"}})");
  EXPECT_EQ(canonicalize_json(j), "{\"a\":{\"y\":\"\xc3\xa9\",\"z\":[1,2]},\"b\":1}");
  EXPECT_THROW(canonicalize_json(nlohmann::json::parse(R"({"x":1.5})")), FormatError);
}

TEST(AttestationTest, PaeLayout) {
  const Bytes out = pae("t", as_bytes("hello"));
  EXPECT_EQ(std::string(out.begin(), out.end()), "DSSEv1 1 t 5 hello");
}

TEST(AttestationTest, Base64) {
  EXPECT_EQ(base64_encode(as_bytes("")), "");
  EXPECT_EQ(base64_encode(as_bytes("f")), "Zg==");
  EXPECT_EQ(base64_encode(as_bytes("foobar")), "Zm9vYmFy");
  SplitMix64 rng(1);
  for (int i = 0; i < 50; ++i) {
    Bytes b = rng.bytes(rng.below(100));
    EXPECT_EQ(base64_decode(base64_encode(b)), b);
  }
  EXPECT_THROW(base64_decode("Zg="), FormatError);
  EXPECT_THROW(base64_decode("Z!=="), FormatError);
}

TEST(AttestationTest, StatementValidation) {
  Statement st = fixture_statement();
  st.subjects[0].digest = {{"sha256", "00"}};
  EXPECT_THROW(st.validate(), FormatError);
  st.subjects[0].digest = {{"md5", std::string(32, '0')}};
  EXPECT_THROW(st.validate(), FormatError);
  st.subjects.clear();
  EXPECT_THROW(st.validate(), FormatError);
  Statement lattice;
  lattice.subjects.push_back({"m", {{std::string(kLatticeDigestName), std::string(128, 'a')}}});
  EXPECT_NO_THROW(lattice.validate());
}

TEST(AttestationTest, BundleRoundTripVerifies) {
  const Bundle b = sign_bundle(fixture_statement(), fixed_key());
  EXPECT_EQ(sign_bundle(fixture_statement(), fixed_key()).to_text(), b.to_text());
  EXPECT_EQ(verify_bundle_text(b.to_text(), fixture_claims()), Verdict::kOk);
  EXPECT_EQ(verify_bundle_text(b.to_text(), fixture_claims(), fixed_key().public_key()), Verdict::kOk);
  EXPECT_EQ(open_statement(b).predicate.at("strategy"), "in-place");
}

TEST(AttestationTest, VerdictPrecedence) {
  const Bundle good = sign_bundle(fixture_statement(), fixed_key());
  auto wrong = fixture_claims();
  wrong["model"].hex[0] = '1';

  EXPECT_EQ(verify_bundle(good, wrong), Verdict::kDigestMismatch);
  EXPECT_EQ(verify_bundle(good, {}), Verdict::kDigestMismatch);
  auto wrong_alg = fixture_claims();
  wrong_alg["model"].algorithm = "sha3-256";
  EXPECT_EQ(verify_bundle(good, wrong_alg), Verdict::kDigestMismatch);

  Bundle flipped = good;
  flipped.envelope.payload[10] ^= 0x01;
  EXPECT_EQ(verify_bundle(flipped, fixture_claims()), Verdict::kSignatureInvalid);
  EXPECT_EQ(verify_bundle(flipped, wrong), Verdict::kSignatureInvalid);

  Bundle bad_sig = good;
  bad_sig.envelope.signatures[0].sig.back() ^= 0x01;
  EXPECT_EQ(verify_bundle(bad_sig, fixture_claims()), Verdict::kSignatureInvalid);
  bad_sig.envelope.signatures[0].sig = {0x30, 0x00};
  EXPECT_EQ(verify_bundle(bad_sig, fixture_claims()), Verdict::kSignatureInvalid);

  const KeyPair other = KeyPair::generate();
  EXPECT_EQ(verify_bundle(good, fixture_claims(), other.public_key()), Verdict::kSignatureInvalid);
  Bundle swapped_key = good;
  swapped_key.public_key_hex = other.public_key().point_hex();
  EXPECT_EQ(verify_bundle(swapped_key, fixture_claims()), Verdict::kSignatureInvalid);

  Bundle no_key = flipped;
  no_key.public_key_hex = "zz";
  EXPECT_EQ(verify_bundle(no_key, wrong), Verdict::kMalformed);
  Bundle no_sigs = good;
  no_sigs.envelope.signatures.clear();
  EXPECT_EQ(verify_bundle(no_sigs, fixture_claims()), Verdict::kMalformed);
  Bundle bad_type = good;
  bad_type.envelope.payload_type = "text/plain";
  EXPECT_EQ(verify_bundle(bad_type, fixture_claims()), Verdict::kMalformed);
  EXPECT_EQ(verify_bundle_text("{", fixture_claims()), Verdict::kMalformed);
  EXPECT_EQ(verify_bundle_text("{}", fixture_claims()), Verdict::kMalformed);
}

TEST(AttestationTest, SignedGarbagePayloadIsMalformed) {
  Bundle b = sign_bundle(fixture_statement(), fixed_key());
  const std::string junk = "not json";
  b.envelope.payload.assign(junk.begin(), junk.end());
  const Digest d = compress_block(CompressionAlg::kSha256, ByteView(pae(kPayloadType, b.envelope.payload)));
  b.envelope.signatures[0].sig = fixed_key().sign_digest(d.bytes());
  EXPECT_EQ(verify_bundle(b, fixture_claims()), Verdict::kMalformed);
}

TEST(AttestationTest, ModelPredicateRoundTrip) {
  const TensorMap model = testing::golden_model();
  WorkPool pool(2);
  for (const auto& cfg : testing::all_configs(CompressionAlg::kSha3_256, 4096)) {
    const auto r = hash_model(cfg, model, pool);
    const Statement st = model_statement("golden", r);
    EXPECT_EQ(config_from_predicate(st.predicate), cfg) << testing::describe(cfg);
    EXPECT_EQ(st.predicate.at("block_count"), r.block_count);
    EXPECT_EQ(st.predicate.contains("layer_digests"), cfg.strategy == Strategy::kPerLayer);
    const Bundle b = sign_bundle(st, fixed_key());
    EXPECT_EQ(verify_bundle(b, {{"golden", {digest_key(r.model_digest), digest_hex(r.model_digest)}}}), Verdict::kOk);
  }
  nlohmann::json p = model_statement("g", hash_model(HashConfig::lattice(Strategy::kInPlace), model, pool)).predicate;
  p["block_size"] = 100;
  EXPECT_THROW(config_from_predicate(p), FormatError);
  p["block_size"] = 8192;
  p["compression"] = "md5";
  EXPECT_THROW(config_from_predicate(p), FormatError);
}

TEST(AttestationTest, DatasetPredicateRoundTrip) {
  SourceDigest d{lt_hash_block(1, as_bytes("x")), 1};
  const Statement st = dataset_statement("shard", 7, d, SampleHashOptions{true});
  const auto p = dataset_predicate(st.predicate);
  EXPECT_EQ(p.source, 7u);
  EXPECT_EQ(p.sample_count, 1u);
  EXPECT_TRUE(p.options.cover_labels);
  EXPECT_EQ(st.subjects[0].digest.at(std::string(kLatticeDigestName)), d.digest.hex());
  EXPECT_THROW(dataset_predicate(fixture_statement().predicate), FormatError);
}

}  // namespace
}  // namespace sentinel
