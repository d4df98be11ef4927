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

#include <algorithm>
#include <vector>

#include "sentinel/lattice.hpp"
#include "sentinel/synthetic.hpp"
#include "support/golden_vectors.hpp"
#include "support/reference.hpp"

namespace sentinel {
namespace {

LatticeDigest random_digest(SplitMix64& rng) {
  LatticeDigest d;
  for (auto& w : d.words) w = rng();
  return d;
}

TEST(LatticeTest, EmptyBlockAtIndexZero) {
  EXPECT_EQ(lt_hash_block(0, ByteView{}).hex(), golden::kLatticeEmptyBlock0);
}

TEST(LatticeTest, TagIsPrependedAsLittleEndian) {
  Bytes data = {1, 2, 3};
  EXPECT_EQ(lt_hash_block(0x0102030405060708ull, data).to_bytes(),
            testing::raw_block_hash({0x0102030405060708ull}, data));
  EXPECT_EQ(lt_hash_tagged({3, 9}, data).to_bytes(), testing::raw_block_hash({3, 9}, data));
  EXPECT_NE(lt_hash_block(1, data), lt_hash_block(2, data));
}

TEST(LatticeTest, AddAndSubMatchLaneByLaneReference) {
  SplitMix64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    LatticeDigest a = random_digest(rng), b = random_digest(rng);
    ASSERT_EQ(lt_add(a, b).to_bytes(), testing::raw_add(a.to_bytes(), b.to_bytes()));
    ASSERT_EQ(lt_sub(a, b).to_bytes(), testing::raw_sub(a.to_bytes(), b.to_bytes()));
  }
}

TEST(LatticeTest, CarryStaysInsideLane) {
  LatticeDigest a, b;
  a.words.fill(0xFFFFFFFFFFFFFFFFull);
  b.words.fill(0x0001000100010001ull);
  EXPECT_EQ(lt_add(a, b), lt_zero());
  a.words.fill(0x0000FFFF0000FFFFull);
  LatticeDigest expect;
  expect.words.fill(0x0001000000010000ull);
  EXPECT_EQ(lt_add(a, b), expect);
}

TEST(LatticeTest, GroupLaws) {
  SplitMix64 rng(6);
  for (int i = 0; i < 500; ++i) {
    LatticeDigest a = random_digest(rng), b = random_digest(rng), c = random_digest(rng);
    ASSERT_EQ(lt_add(a, b), lt_add(b, a));
    ASSERT_EQ(lt_add(lt_add(a, b), c), lt_add(a, lt_add(b, c)));
    ASSERT_EQ(lt_add(a, lt_zero()), a);
    ASSERT_EQ(lt_sub(lt_add(a, b), b), a);
    ASSERT_EQ(lt_add(a, lt_neg(a)), lt_zero());
  }
}

TEST(LatticeTest, PartitionReadsSixteenBitLanes) {
  Bytes raw(64);
  for (std::size_t i = 0; i < 64; ++i) raw[i] = static_cast<Byte>(i);
  LatticeDigest d = LatticeDigest::from_bytes(raw);
  for (std::size_t i = 0; i < kLatticePartitions; ++i) {
    EXPECT_EQ(d.partition(i), raw[2 * i] | (raw[2 * i + 1] << 8));
  }
  EXPECT_EQ(LatticeDigest::from_hex(d.hex()), d);
  EXPECT_THROW(LatticeDigest::from_bytes(Bytes(63)), InvalidInput);
  EXPECT_THROW(LatticeDigest::from_hex("00"), FormatError);
}

TEST(LatticeTest, ReduceIsOrderInvariant) {
  SplitMix64 rng(8);
  for (std::size_t workers : {1, 2, 4}) {
    WorkPool pool(workers);
    for (std::size_t n : {0, 1, 2, 3, 5, 17, 1000, 5001}) {
      std::vector<LatticeDigest> ds(n);
      for (auto& d : ds) d = random_digest(rng);
      const LatticeDigest serial = lt_reduce(ds);
      ASSERT_EQ(lt_reduce(ds, pool), serial);
      std::vector<std::size_t> perm(n);
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      std::vector<LatticeDigest> shuffled;
      for (auto p : perm) shuffled.push_back(ds[p]);
      ASSERT_EQ(lt_reduce(shuffled, pool), serial);
    }
  }
}

TEST(LatticeTest, IncrementalUpdateEqualsRecompute) {
  SplitMix64 rng(9);
  std::vector<Bytes> blocks;
  for (int i = 0; i < 50; ++i) blocks.push_back(rng.bytes(64));
  LatticeDigest total;
  for (std::size_t i = 0; i < blocks.size(); ++i) total += lt_hash_block(i, blocks[i]);
  Bytes replacement = rng.bytes(64);
  total -= lt_hash_block(17, blocks[17]);
  total += lt_hash_block(17, replacement);
  blocks[17] = replacement;
  LatticeDigest fresh;
  for (std::size_t i = 0; i < blocks.size(); ++i) fresh += lt_hash_block(i, blocks[i]);
  EXPECT_EQ(total, fresh);
}

}  // namespace
}  // namespace sentinel
