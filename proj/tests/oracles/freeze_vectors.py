#!/usr/bin/env python3
# Copyright 2026 The Sentinel Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent re-derivation of the golden values frozen into the C++ tests.

Uses only hashlib, json and the `cryptography` package, so none of the values
printed here pass through the C++ code they check. Run it and compare its
output against the constants in tests/support/golden_vectors.hpp.
"""
import hashlib
import json
import struct

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.asymmetric.utils import decode_dss_signature

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def fill(self, n):
        out = bytearray()
        while len(out) < n:
            out += struct.pack("<Q", self.next())
        return bytes(out[:n])


def h(alg, data):
    if alg == "sha256":
        return hashlib.sha256(data).digest()
    if alg == "blake2b":
        return hashlib.blake2b(data, digest_size=64).digest()
    if alg == "sha3-256":
        return hashlib.sha3_256(data).digest()
    raise ValueError(alg)


def merkle_root(alg, leaves):
    width = len(leaves[0])
    level = list(leaves)
    while len(level) > 1:
        if len(level) % 2:
            level.append(bytes(width))
        level = [h(alg, level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def lt_add(a, b):
    out = bytearray(64)
    for i in range(32):
        x = int.from_bytes(a[2 * i:2 * i + 2], "little")
        y = int.from_bytes(b[2 * i:2 * i + 2], "little")
        out[2 * i:2 * i + 2] = ((x + y) & 0xFFFF).to_bytes(2, "little")
    return bytes(out)


def lt_sum(items):
    acc = bytes(64)
    for it in items:
        acc = lt_add(acc, it)
    return acc


def le64(v):
    return struct.pack("<Q", v)


def blocks(data, size):
    return [data[o:o + size] for o in range(0, len(data), size)]


def golden_model():
    rng = SplitMix64(42)
    sizes = [3 * 8192 + 100, 5000, 0, 8192, 1]
    return [(f"layer{i}", rng.fill(n)) for i, n in enumerate(sizes)]


def model_digests(alg, bs=8192):
    model = golden_model()
    out = {}
    # coalesced
    buf = b"".join(t for _, t in model)
    pad = (-len(buf)) % bs
    padded = buf + bytes(pad)
    out["merkle_coalesced"] = merkle_root(alg, [h(alg, b) for b in blocks(padded, bs)])
    out["lattice_coalesced"] = lt_sum(
        h("blake2b", le64(k) + b) for k, b in enumerate(blocks(padded, bs)))
    # in-place
    inplace = [b for _, t in model for b in blocks(t, bs)]
    out["merkle_inplace"] = merkle_root(alg, [h(alg, b) for b in inplace])
    out["lattice_inplace"] = lt_sum(h("blake2b", le64(k) + b) for k, b in enumerate(inplace))
    # per-layer
    layers = []
    for _, t in model:
        if not t:
            layers.append(h(alg, b""))
            continue
        tb = blocks(t + bytes((-len(t)) % bs), bs)
        layers.append(merkle_root(alg, [h(alg, b) for b in tb]))
    out["merkle_per_layer"] = merkle_root(alg, layers)
    out["merkle_layer1"] = layers[1]
    llayers = [lt_sum(h("blake2b", le64(i) + le64(j) + b) for j, b in enumerate(blocks(t, bs)))
               for i, (_, t) in enumerate(model)]
    out["lattice_per_layer"] = lt_sum(llayers)
    out["lattice_layer0"] = llayers[0]
    return out


def main():
    print("# known answers")
    for alg in ("sha256", "blake2b", "sha3-256"):
        for msg in (b"", b"abc"):
            print(alg, repr(msg), h(alg, msg).hex())
    mib = SplitMix64(7).fill(1 << 20)
    for alg in ("sha256", "blake2b", "sha3-256"):
        print("1MiB splitmix(7)", alg, h(alg, mib).hex())

    print("# merkle four leaves a,b,c,d (sha256)")
    leaves = [h("sha256", x) for x in (b"a", b"b", b"c", b"d")]
    print(merkle_root("sha256", leaves).hex())
    print("# merkle three leaves a,b,c (sha256)")
    print(merkle_root("sha256", leaves[:3]).hex())

    print("# lattice block 0, empty data")
    print(h("blake2b", le64(0)).hex())

    for alg in ("sha256",):
        for k, v in model_digests(alg).items():
            print("golden model", alg, k, v.hex())

    print("# rfc6979 P-256/SHA-256 'sample'")
    d = int("C9AFA9D845BA75166B5C215767B1D6934E50C3DB36E89B127B8A622B120F6721", 16)
    key = ec.derive_private_key(d, ec.SECP256R1())
    sig = key.sign(b"sample", ec.ECDSA(hashes.SHA256(), deterministic_signing=True))
    r, s = decode_dss_signature(sig)
    print(f"{r:064x}", f"{s:064x}")

    print("# canonical statement")
    stmt = {
        "_type": "https://in-toto.io/Statement/v1",
        "subject": [{"name": "model", "digest": {"sha256": "00" * 32}}],
        "predicateType": "https://sentinel.dev/attestation/ml-digest/v1",
        "predicate": {"construction": "merkle", "compression": "sha256",
                      "strategy": "in-place", "block_size": 8192,
                      "index_encoding": "le64-prefix", "label_coverage": False},
    }
    print(json.dumps(stmt, sort_keys=True, separators=(",", ":"), ensure_ascii=False))
    body = json.dumps(stmt, sort_keys=True, separators=(",", ":")).encode()
    ptype = b"application/vnd.in-toto+json"
    pae = b"DSSEv1 %d %s %d %s" % (len(ptype), ptype, len(body), body)
    print("pae sha256", hashlib.sha256(pae).hexdigest())


if __name__ == "__main__":
    main()
