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

#include <string>
#include <vector>

#include "sentinel/merkle.hpp"
#include "sentinel/synthetic.hpp"
#include "support/golden_vectors.hpp"
#include "support/reference.hpp"

namespace sentinel {
namespace {

DigestBuffer leaves_of(CompressionAlg alg, const std::vector<std::string>& msgs) {
  DigestBuffer buf(alg, msgs.size());
  for (const auto& m : msgs) buf.push_back(compress_block(alg, m));
  return buf;
}

TEST(MerkleTest, FourLeafRoot) {
  WorkPool pool(2);
  EXPECT_EQ(merkle_root(leaves_of(CompressionAlg::kSha256, {"a", "b", "c", "d"}), pool).hex(), golden::kMerkleAbcd);
}

TEST(MerkleTest, OddLevelUsesZeroPadding) {
  WorkPool pool(2);
  EXPECT_EQ(merkle_root(leaves_of(CompressionAlg::kSha256, {"a", "b", "c"}), pool).hex(), golden::kMerkleAbc);
}

TEST(MerkleTest, SingleLeafIsRoot) {
  WorkPool pool(1);
  Digest leaf = compress_block(CompressionAlg::kSha3_256, "only");
  auto r = merkle_root_accounted(leaves_of(CompressionAlg::kSha3_256, {"only"}), pool);
  EXPECT_EQ(r.root, leaf);
  EXPECT_EQ(r.reduction_bytes, 0u);
}

TEST(MerkleTest, EmptyInputRejected) {
  WorkPool pool(1);
  EXPECT_THROW(merkle_root(DigestBuffer(CompressionAlg::kSha256, 0), pool), InvalidInput);
  EXPECT_THROW(hash_blocks(CompressionAlg::kSha256, {}, pool), InvalidInput);
}

TEST(MerkleTest, MatchesReferenceForEveryLeafCount) {
  SplitMix64 rng(11);
  for (auto alg : {CompressionAlg::kSha256, CompressionAlg::kBlake2b, CompressionAlg::kSha3_256}) {
    for (std::size_t workers : {1, 3, 4}) {
      WorkPool pool(workers);
      for (std::size_t n = 1; n <= 70; ++n) {
        std::vector<Bytes> blocks;
        std::vector<ByteView> views;
        std::vector<Digest> ref;
        for (std::size_t i = 0; i < n; ++i) blocks.push_back(rng.bytes(rng.below(100)));
        for (const auto& b : blocks) {
          views.emplace_back(b);
          ref.push_back(compress_block(alg, ByteView(b)));
        }
        DigestBuffer leaves = hash_blocks(alg, views, pool);
        ASSERT_EQ(leaves.count(), n);
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(leaves.digest(i), ref[i]);
        ASSERT_EQ(merkle_root(std::move(leaves), pool), testing::ref_merkle_root(alg, ref))
            << alg_name(alg) << " n=" << n << " workers=" << workers;
      }
    }
  }
}

TEST(MerkleTest, ReductionUsesHalfLeafStorage) {
  WorkPool pool(2);
  for (std::size_t n : {2, 3, 1000, 1001}) {
    DigestBuffer leaves(CompressionAlg::kSha256, n);
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(compress_block(CompressionAlg::kSha256, std::to_string(i)));
    auto r = merkle_root_accounted(std::move(leaves), pool);
    EXPECT_EQ(r.reduction_bytes, (n + 1) / 2 * 32);
  }
}

TEST(MerkleTest, ReduceLevelStepByStep) {
  WorkPool pool(1);
  ReductionState state(leaves_of(CompressionAlg::kSha256, {"a", "b", "c", "d", "e"}));
  EXPECT_EQ(reduce_level(state, pool), 3u);
  EXPECT_EQ(reduce_level(state, pool), 2u);
  EXPECT_EQ(reduce_level(state, pool), 1u);
  EXPECT_THROW(reduce_level(state, pool), InvalidState);
}

TEST(MerkleTest, LeafOrderMatters) {
  WorkPool pool(1);
  EXPECT_NE(merkle_root(leaves_of(CompressionAlg::kSha256, {"a", "b"}), pool),
            merkle_root(leaves_of(CompressionAlg::kSha256, {"b", "a"}), pool));
}

}  // namespace
}  // namespace sentinel
