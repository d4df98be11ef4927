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


// Library walkthrough: hash a model two ways, sign the digest, verify it,
// then digest a small dataset per source.

#include <iostream>

#include "sentinel/sentinel.hpp"

int main() {
  using namespace sentinel;

  WorkPool pool;  // SENTINEL_WORKERS or all cores
  const TensorMap model = make_synthetic_model(24, 8 << 20, /*seed=*/7);

  // In-place Merkle over SHA-256: no copies, one leaf per block-table row.
  const auto merkle = hash_model(HashConfig::merkle(CompressionAlg::kSha256, Strategy::kInPlace), model, pool);
  std::cout << "merkle  " << digest_hex(merkle.model_digest) << "  aux " << merkle.memory.total() << " B\n";

  // Lattice per-layer: layer digests sum to the model digest.
  const auto lattice = hash_model(HashConfig::lattice(Strategy::kPerLayer), model, pool);
  LatticeDigest sum;
  for (const auto& layer : *lattice.layer_digests) sum += std::get<LatticeDigest>(layer.digest);
  std::cout << "lattice " << digest_hex(lattice.model_digest).substr(0, 32) << "..  layers sum back: "
            << (sum == std::get<LatticeDigest>(lattice.model_digest) ? "yes" : "no") << "\n";

  const KeyPair key = KeyPair::generate();
  const Bundle bundle = sign_bundle(model_statement("demo", merkle), key);
  const Verdict v =
      verify_bundle_text(bundle.to_text(), {{"demo", {digest_key(merkle.model_digest), digest_hex(merkle.model_digest)}}},
                         key.public_key());
  std::cout << "bundle  " << to_string(v) << "\n";

  const auto samples = make_synthetic_dataset(2000, 4, 0, /*seed=*/1);
  const auto digests = digest_dataset(samples, {0, 1, 2, 3}, /*batch_size=*/128, /*seed=*/42, pool);
  for (const auto& [source, d] : digests) {
    std::cout << "source " << source << ": " << d.count << " samples  " << d.digest.hex().substr(0, 32) << "..\n";
  }
  return v == Verdict::kOk ? 0 : 1;
}
