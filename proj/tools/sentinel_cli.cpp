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

// sentinel: sign and verify model and dataset attestations, and benchmark
// the hashing strategies.
//
// Exit codes: 0 success or verified, 1 verification failure, 2 usage,
// configuration or I/O error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sentinel/sentinel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sentinel::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct Globals {
  bool json = false;
  std::size_t workers = 0;  // 0: logical cores
};

// SENTINEL_WORKERS wins over --workers, which wins over the core count.
std::size_t resolve_workers(std::size_t flag) {
  if (const char* env = std::getenv("SENTINEL_WORKERS"); env != nullptr && *env != '\0') {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("SENTINEL_WORKERS must be a positive integer, got '") + env + "'");
  }
  if (flag != 0) return flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string read_text(const fs::path& p) {
  Bytes raw = detail::read_file(p);
  return std::string(raw.begin(), raw.end());
}

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

// Hash flags shared by sign-model and verify-model.
struct HashFlags {
  std::string construction = "merkle";
  std::string compression;
  std::string strategy = "in-place";
  std::size_t block_size = kDefaultModelBlockSize;
  bool ordered = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--construction", construction, "merkle or lattice")->capture_default_str();
    cmd->add_option("--compression", compression, "sha256, blake2b or sha3-256 (lattice: blake2b only)");
    cmd->add_option("--strategy", strategy, "coalesced, per-layer or in-place")->capture_default_str();
    cmd->add_option("--block-size", block_size, "block size in bytes, a power of two >= 64")
        ->capture_default_str();
    cmd->add_flag("--ordered", ordered, "lattice per-layer only: schedule layers smallest first");
  }

  HashConfig to_config() const {
    auto c = parse_construction(construction);
    if (!c) throw ConfigError("unknown construction '" + construction + "'");
    auto s = parse_strategy(strategy);
    if (!s) throw ConfigError("unknown strategy '" + strategy + "'");
    HashConfig cfg;
    cfg.construction = *c;
    cfg.strategy = *s;
    cfg.block_size = block_size;
    cfg.ordered_per_layer = ordered;
    const std::string alg_text = !compression.empty() ? compression
                                 : *c == Construction::kLattice ? "blake2b"
                                                                : "sha256";
    auto alg = parse_alg(alg_text);
    if (!alg) throw ConfigError("unknown compression '" + alg_text + "'");
    cfg.alg = *alg;
    cfg.validate();
    return cfg;
  }
};

std::string config_line(const HashConfig& cfg) {
  std::ostringstream os;
  os << construction_name(cfg.construction) << "/" << alg_name(cfg.alg) << "/" << strategy_name(cfg.strategy)
     << (cfg.ordered_per_layer ? "/ordered" : "") << " block_size=" << cfg.block_size;
  return os.str();
}

std::optional<PublicKey> load_trusted(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return PublicKey::from_pem(read_text(path));
}

void write_new_file(const fs::path& p, const std::string& text, bool force) {
  if (fs::exists(p) && !force) throw IoError(p.string() + " exists; pass --force to overwrite");
  detail::write_text(p, text);
}

// ---------------------------------------------------------------- keygen

struct KeygenArgs {
  std::string out;
  bool force = false;
};

int cmd_keygen(const Globals& g, const KeygenArgs& a) {
  const fs::path priv = a.out + ".key";
  const fs::path pub = a.out + ".pub";
  if (!a.force) {
    for (const auto& p : {priv, pub}) {
      if (fs::exists(p)) throw IoError(p.string() + " exists; pass --force to overwrite");
    }
  }
  const KeyPair key = KeyPair::generate();
  write_new_file(priv, key.private_pem(), a.force);
  fs::permissions(priv, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
  write_new_file(pub, key.public_key().to_pem(), a.force);
  const std::string id = key_id(key.public_key());
  emit(g, {{"private_key", priv.string()}, {"public_key", pub.string()}, {"keyid", id}},
       "wrote " + priv.string() + " and " + pub.string() + " (keyid " + id + ")\n");
  return kExitOk;
}

// ---------------------------------------------------------------- models

struct SignModelArgs {
  std::string model, key, out, name;
  HashFlags flags;
};

int cmd_sign_model(const Globals& g, const SignModelArgs& a) {
  const HashConfig cfg = a.flags.to_config();
  const KeyPair key = KeyPair::from_pem(read_text(a.key));
  const TensorMap model = load_model(a.model);
  WorkPool pool(resolve_workers(g.workers));

  auto start = std::chrono::steady_clock::now();
  const ModelDigestResult r = hash_model(cfg, model, pool);
  const double hash_ms = ms_since(start);

  const std::string name = a.name.empty() ? fs::path(a.model).stem().string() : a.name;
  start = std::chrono::steady_clock::now();
  const Bundle bundle = sign_bundle(model_statement(name, r), key);
  const double sign_ms = ms_since(start);
  detail::write_text(a.out, bundle.to_text());

  json j = {{"bundle", a.out},          {"subject", name},      {"config", config_line(cfg)},
            {"digest", digest_hex(r.model_digest)}, {"tensors", model.size()}, {"bytes", model.total_bytes()},
            {"blocks", r.block_count},  {"hash_ms", hash_ms},   {"sign_ms", sign_ms},
            {"workers", pool.workers()}};
  if (r.layer_digests) j["layer_digests"] = r.layer_digests->size();
  std::ostringstream os;
  os << "config   " << config_line(cfg) << "\n"
     << "model    " << name << ": " << model.size() << " tensors, " << model.total_bytes() << " bytes, "
     << r.block_count << " blocks\n"
     << "digest   " << digest_key(r.model_digest) << ":" << digest_hex(r.model_digest) << "\n";
  if (r.layer_digests) os << "layers   " << r.layer_digests->size() << " layer digests in predicate\n";
  os << "timing   hash " << hash_ms << " ms, sign " << sign_ms << " ms (" << pool.workers() << " workers)\n"
     << "wrote    " << a.out << "\n";
  emit(g, j, os.str());
  return kExitOk;
}

struct VerifyModelArgs {
  std::string model, bundle, pubkey;
  HashFlags flags;
};

int report_verdict(const Globals& g, Verdict v, const std::string& detail_text, json extra = json::object()) {
  extra["verdict"] = to_string(v);
  if (!detail_text.empty()) extra["detail"] = detail_text;
  std::string text = std::string(to_string(v));
  if (!detail_text.empty()) text += ": " + detail_text;
  emit(g, extra, text + "\n");
  return v == Verdict::kOk ? kExitOk : kExitVerifyFailed;
}

int cmd_verify_model(const Globals& g, const VerifyModelArgs& a, bool hash_flags_given) {
  const std::optional<PublicKey> trusted = load_trusted(a.pubkey);
  const std::string text = read_text(a.bundle);
  Bundle bundle;
  try {
    bundle = Bundle::from_text(text);
  } catch (const FormatError& e) {
    return report_verdict(g, Verdict::kMalformed, e.what());
  }
  if (Verdict v = check_signature(bundle, trusted); v != Verdict::kOk) return report_verdict(g, v, "");

  Statement stmt;
  HashConfig cfg;
  try {
    stmt = open_statement(bundle);
    cfg = config_from_predicate(stmt.predicate);
  } catch (const FormatError& e) {
    return report_verdict(g, Verdict::kMalformed, e.what());
  }
  if (stmt.subjects.size() != 1) return report_verdict(g, Verdict::kMalformed, "expected exactly one subject");
  if (hash_flags_given) {
    std::cerr << "note: hash flags ignored; replaying " << config_line(cfg) << " from the bundle predicate\n";
  }

  const TensorMap model = load_model(a.model);
  WorkPool pool(resolve_workers(g.workers));
  const auto start = std::chrono::steady_clock::now();
  const ModelDigestResult r = hash_model(cfg, model, pool);
  const double hash_ms = ms_since(start);

  const std::string& name = stmt.subjects[0].name;
  const Verdict v = verify_bundle(bundle, {{name, {digest_key(r.model_digest), digest_hex(r.model_digest)}}}, trusted);
  std::string detail_text;
  json extra = {{"subject", name}, {"config", config_line(cfg)}, {"hash_ms", hash_ms}};
  if (v == Verdict::kDigestMismatch && r.layer_digests && stmt.predicate.contains("layer_digests")) {
    // Name the layers that changed when the predicate carries them.
    std::vector<std::string> changed;
    const auto& claimed = stmt.predicate.at("layer_digests");
    for (const auto& l : *r.layer_digests) {
      if (!claimed.contains(l.name) || claimed.at(l.name) != digest_hex(l.digest)) changed.push_back(l.name);
    }
    extra["changed_layers"] = changed;
    if (!changed.empty()) {
      detail_text = "changed layers:";
      for (const auto& c : changed) detail_text += " " + c;
    }
  }
  return report_verdict(g, v, detail_text, extra);
}

// ---------------------------------------------------------------- datasets

struct SignDatasetArgs {
  std::string dataset, key, out_dir;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  bool cover_labels = false;
};

fs::path source_bundle_path(const fs::path& dir, SourceId s) {
  return dir / ("source-" + std::to_string(s) + ".bundle.json");
}

std::string source_subject(const fs::path& dataset, SourceId s) {
  return dataset.stem().string() + "/source-" + std::to_string(s);
}

int cmd_sign_dataset(const Globals& g, const SignDatasetArgs& a) {
  const KeyPair key = KeyPair::from_pem(read_text(a.key));
  const DatasetManifest manifest = load_dataset_manifest(a.dataset);
  const auto samples = load_samples(manifest);
  WorkPool pool(resolve_workers(g.workers));
  const SampleHashOptions opts{a.cover_labels};

  const auto start = std::chrono::steady_clock::now();
  std::map<SourceId, SourceDigest> digests;
  try {
    digests = digest_dataset(samples, manifest.sources, a.batch_size, a.seed, pool, opts);
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  const double hash_ms = ms_since(start);

  fs::create_directories(a.out_dir);
  json rows = json::array();
  std::ostringstream os;
  for (const auto& [source, d] : digests) {
    const fs::path out = source_bundle_path(a.out_dir, source);
    detail::write_text(out, sign_bundle(dataset_statement(source_subject(a.dataset, source), source, d, opts), key)
                                .to_text());
    rows.push_back({{"source", source}, {"samples", d.count}, {"digest", d.digest.hex()}, {"bundle", out.string()}});
    os << "source " << source << ": " << d.count << " samples -> " << out.string() << "\n";
  }
  os << digests.size() << " bundles, " << samples.size() << " samples, hash " << hash_ms << " ms ("
     << pool.workers() << " workers)\n";
  emit(g, {{"sources", rows}, {"samples", samples.size()}, {"hash_ms", hash_ms}}, os.str());
  return kExitOk;
}

struct VerifyDatasetArgs {
  std::string dataset, pubkey;
  std::vector<std::string> bundles;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
};

std::vector<fs::path> expand_bundle_paths(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(a)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(a);
    }
  }
  return out;
}

int cmd_verify_dataset(const Globals& g, const VerifyDatasetArgs& a) {
  const std::optional<PublicKey> trusted = load_trusted(a.pubkey);
  const DatasetManifest manifest = load_dataset_manifest(a.dataset);
  const auto samples = load_samples(manifest);
  const auto paths = expand_bundle_paths(a.bundles);

  std::set<SourceId> represented;
  for (const auto& s : samples) represented.insert(s.source_id);
  if (samples.empty() && paths.empty()) {
    std::cerr << "warning: empty dataset and no bundles; nothing to verify\n";
    emit(g, {{"ok", true}, {"sources", json::array()}}, "OK: nothing to verify\n");
    return kExitOk;
  }

  // Open every bundle first; the predicate decides whether labels are covered.
  struct Opened {
    fs::path path;
    Bundle bundle;
    Verdict verdict = Verdict::kOk;
    std::string detail;
    std::optional<DatasetPredicate> predicate;
    std::string subject;
  };
  std::vector<Opened> opened;
  for (const auto& p : paths) {
    Opened o{p, {}, Verdict::kOk, "", std::nullopt, ""};
    try {
      o.bundle = Bundle::from_text(read_text(p));
      o.verdict = check_signature(o.bundle, trusted);
      if (o.verdict == Verdict::kOk) {
        Statement st = open_statement(o.bundle);
        if (st.subjects.size() != 1) throw FormatError("expected exactly one subject");
        o.predicate = dataset_predicate(st.predicate);
        o.subject = st.subjects[0].name;
      }
    } catch (const FormatError& e) {
      o.verdict = Verdict::kMalformed;
      o.detail = e.what();
    }
    opened.push_back(std::move(o));
  }

  WorkPool pool(resolve_workers(g.workers));
  std::map<bool, std::map<SourceId, SourceDigest>> recomputed;  // keyed by label coverage
  auto digests_for = [&](bool cover_labels) -> const std::map<SourceId, SourceDigest>& {
    auto it = recomputed.find(cover_labels);
    if (it == recomputed.end()) {
      try {
        it = recomputed.emplace(cover_labels, digest_dataset(samples, manifest.sources, a.batch_size, a.seed, pool,
                                                             SampleHashOptions{cover_labels}))
                 .first;
      } catch (const ValidationError& e) {
        throw FormatError(e.what());
      }
    }
    return it->second;
  };

  bool all_ok = true;
  std::set<SourceId> covered;
  json rows = json::array();
  std::ostringstream os;
  for (auto& o : opened) {
    std::optional<SourceId> source;
    if (o.predicate) {
      source = o.predicate->source;
      const auto& digests = digests_for(o.predicate->options.cover_labels);
      auto it = digests.find(*source);
      if (it == digests.end()) {
        o.verdict = Verdict::kDigestMismatch;
        o.detail = "source not declared by the dataset";
      } else {
        o.verdict = verify_bundle(o.bundle, {{o.subject, {std::string(kLatticeDigestName), it->second.digest.hex()}}},
                                  trusted);
        if (o.verdict == Verdict::kOk && it->second.count != o.predicate->sample_count) {
          o.verdict = Verdict::kDigestMismatch;
          o.detail = "sample count " + std::to_string(it->second.count) + ", attested " +
                     std::to_string(o.predicate->sample_count);
        }
      }
      if (o.verdict == Verdict::kOk) covered.insert(*source);
    }
    all_ok = all_ok && o.verdict == Verdict::kOk;
    json row = {{"bundle", o.path.string()}, {"verdict", to_string(o.verdict)}};
    if (source) row["source"] = *source;
    if (!o.detail.empty()) row["detail"] = o.detail;
    rows.push_back(row);
    os << (source ? "source " + std::to_string(*source) : o.path.string()) << ": " << to_string(o.verdict)
       << (o.detail.empty() ? "" : " (" + o.detail + ")") << "\n";
  }
  json missing = json::array();
  for (SourceId s : represented) {
    bool attested = false;
    for (const auto& o : opened) attested = attested || (o.predicate && o.predicate->source == s);
    if (!attested) {
      all_ok = false;
      missing.push_back(s);
      os << "source " << s << ": MISSING (no bundle)\n";
    }
  }
  os << (all_ok ? "OK" : "FAILED") << ": " << covered.size() << " of " << opened.size() << " bundles verified\n";
  emit(g, {{"ok", all_ok}, {"sources", rows}, {"missing", missing}}, os.str());
  return all_ok ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------- inspect

int cmd_inspect(const Globals& g, const std::string& path) {
  const Bundle b = Bundle::from_text(read_text(path));
  const Verdict sig = check_signature(b);
  json payload;
  try {
    payload = json::parse(b.envelope.payload.begin(), b.envelope.payload.end());
  } catch (const json::exception&) {
    payload = std::string(b.envelope.payload.begin(), b.envelope.payload.end());
  }
  json keyids = json::array();
  for (const auto& s : b.envelope.signatures) keyids.push_back(s.keyid);
  json j = {{"mediaType", b.media_type},
            {"payloadType", b.envelope.payload_type},
            {"publicKey", b.public_key_hex},
            {"keyids", keyids},
            {"signature", to_string(sig)},
            {"statement", payload}};
  std::ostringstream os;
  os << "mediaType    " << b.media_type << "\n"
     << "payloadType  " << b.envelope.payload_type << "\n"
     << "publicKey    " << b.public_key_hex << "\n"
     << "keyids       " << keyids.dump() << "\n"
     << "signature    " << to_string(sig) << " (embedded key)\n"
     << "statement\n"
     << payload.dump(2) << "\n";
  emit(g, j, os.str());
  return kExitOk;
}

// ---------------------------------------------------------------- fixtures

struct SynthModelArgs {
  std::string out, shape;
  double scale = 0.01;
  std::size_t layers = 16;
  double size_mib = 4;
  std::uint64_t seed = 1;
};

int cmd_synth_model(const Globals& g, const SynthModelArgs& a) {
  TensorMap model;
  if (!a.shape.empty()) {
    auto shape = find_shape(a.shape);
    if (!shape) throw ConfigError("unknown model shape '" + a.shape + "'");
    model = make_synthetic_model(*shape, a.scale, a.seed);
  } else {
    model = make_synthetic_model(a.layers, static_cast<std::uint64_t>(a.size_mib * 1024 * 1024), a.seed);
  }
  const fs::path out(a.out);
  save_model(model, out, out.stem().string() + ".bin");
  emit(g, {{"manifest", a.out}, {"tensors", model.size()}, {"bytes", model.total_bytes()}},
       "wrote " + a.out + ": " + std::to_string(model.size()) + " tensors, " + std::to_string(model.total_bytes()) +
           " bytes\n");
  return kExitOk;
}

struct SynthDatasetArgs {
  std::string out;
  std::size_t count = 1000;
  std::uint32_t sources = 16;
  std::size_t sample_size = 0;
  std::uint64_t seed = 1;
};

int cmd_synth_dataset(const Globals& g, const SynthDatasetArgs& a) {
  if (a.sources == 0) throw ConfigError("--sources must be at least 1");
  const auto samples = make_synthetic_dataset(a.count, a.sources, a.sample_size, a.seed);
  std::set<SourceId> sources;
  for (SourceId s = 0; s < a.sources; ++s) sources.insert(s);
  const fs::path out(a.out);
  save_dataset(samples, sources, out, out.stem().string() + ".bin");
  emit(g, {{"manifest", a.out}, {"samples", samples.size()}, {"sources", a.sources}},
       "wrote " + a.out + ": " + std::to_string(samples.size()) + " samples over " + std::to_string(a.sources) +
           " sources\n");
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::string> sizes{"resnet152", "vgg19"};
  double scale = 0.0625;
  std::vector<std::size_t> workers;
  std::size_t repeats = 5;
  std::vector<std::string> constructions{"merkle", "lattice"};
  std::vector<std::string> compressions{"sha256", "blake2b", "sha3-256"};
  std::vector<std::string> strategies{"coalesced", "per-layer", "in-place"};
  std::size_t block_size = kDefaultModelBlockSize;
  std::uint64_t seed = 1;
};

struct BenchModel {
  std::string label;
  TensorMap model;
};

// "resnet152" etc. use the reference layer count and size times --scale;
// "<layers>x<MiB>" (e.g. 64x128) gives an explicit shape.
BenchModel bench_model(const std::string& entry, double scale, std::uint64_t seed) {
  if (auto shape = find_shape(entry)) return {entry, make_synthetic_model(*shape, scale, seed)};
  const auto x = entry.find('x');
  if (x == std::string::npos) throw ConfigError("bad --sizes entry '" + entry + "' (shape name or LAYERSxMIB)");
  try {
    const std::size_t layers = std::stoul(entry.substr(0, x));
    const double mib = std::stod(entry.substr(x + 1));
    if (layers == 0 || mib <= 0) throw ConfigError("bad --sizes entry '" + entry + "'");
    return {entry, make_synthetic_model(layers, static_cast<std::uint64_t>(mib * 1024 * 1024), seed)};
  } catch (const std::logic_error&) {
    throw ConfigError("bad --sizes entry '" + entry + "'");
  }
}

std::vector<HashConfig> bench_configs(const BenchArgs& a) {
  std::vector<HashConfig> out;
  for (const auto& cs : a.constructions) {
    auto c = parse_construction(cs);
    if (!c) throw ConfigError("unknown construction '" + cs + "'");
    for (const auto& ss : a.strategies) {
      auto s = parse_strategy(ss);
      if (!s) throw ConfigError("unknown strategy '" + ss + "'");
      if (*c == Construction::kLattice) {
        out.push_back(HashConfig::lattice(*s, false, a.block_size));
        if (*s == Strategy::kPerLayer) out.push_back(HashConfig::lattice(*s, true, a.block_size));
        continue;
      }
      for (const auto& as : a.compressions) {
        auto alg = parse_alg(as);
        if (!alg) throw ConfigError("unknown compression '" + as + "'");
        out.push_back(HashConfig::merkle(*alg, *s, a.block_size));
      }
    }
  }
  for (const auto& cfg : out) cfg.validate();
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

int cmd_bench(const Globals& g, BenchArgs a) {
  if (a.repeats < 5) throw ConfigError("--repeats must be at least 5");
  std::vector<std::size_t> counts = a.workers;
  if (const char* env = std::getenv("SENTINEL_WORKERS"); env != nullptr && *env != '\0') {
    counts = {resolve_workers(0)};
  }
  if (counts.empty()) counts = {1, resolve_workers(0)};
  if (std::find(counts.begin(), counts.end(), 1u) == counts.end()) counts.insert(counts.begin(), 1);
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  if (counts.front() == 0) throw ConfigError("worker counts must be positive");
  const auto configs = bench_configs(a);

  bool all_consistent = true;
  json cells = json::array();
  std::ostringstream os;
  char line[256];
  for (const auto& entry : a.sizes) {
    const BenchModel bm = bench_model(entry, a.scale, a.seed);
    const auto views = bm.model.views();
    std::vector<ByteView> chunks;
    for (const auto& t : views) chunks.push_back(t.data);
    const double mib = static_cast<double>(bm.model.total_bytes()) / (1024.0 * 1024.0);
    os << "\nmodel " << bm.label << ": " << bm.model.size() << " tensors, " << mib << " MiB, block_size "
       << a.block_size << ", median of " << a.repeats << " runs\n";
    std::snprintf(line, sizeof line, "%-34s %7s %11s %9s %9s  %s\n", "config", "workers", "median_ms", "MiB/s",
                  "vs_base", "digest");
    os << line;

    // Sequential baseline: one stream hash over all tensor bytes per algorithm.
    std::map<CompressionAlg, double> baseline;
    for (const auto& cfg : configs) {
      if (baseline.contains(cfg.alg)) continue;
      std::vector<double> times;
      for (std::size_t r = 0; r < a.repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        (void)sequential_hash_chunks(cfg.alg, chunks);
        times.push_back(ms_since(start));
      }
      baseline[cfg.alg] = median(times);
      const std::string label = "baseline/sequential/" + std::string(alg_name(cfg.alg));
      std::snprintf(line, sizeof line, "%-34s %7d %11.2f %9.1f %9.2f  -\n", label.c_str(), 1, baseline[cfg.alg],
                    mib / (baseline[cfg.alg] / 1000.0), 1.0);
      os << line;
      cells.push_back({{"model", bm.label}, {"config", label}, {"workers", 1}, {"median_ms", baseline[cfg.alg]},
                       {"speedup_vs_baseline", 1.0}, {"consistent", true}});
    }

    for (const auto& cfg : configs) {
      std::string reference;
      for (std::size_t w : counts) {
        WorkPool pool(w);
        std::vector<double> times;
        std::string digest;
        bool consistent = true;
        for (std::size_t r = 0; r < a.repeats; ++r) {
          const auto start = std::chrono::steady_clock::now();
          const auto res = hash_model(cfg, views, pool);
          times.push_back(ms_since(start));
          const std::string hex = digest_hex(res.model_digest);
          if (digest.empty()) digest = hex;
          consistent = consistent && hex == digest;
        }
        if (w == 1) reference = digest;
        consistent = consistent && digest == reference;
        all_consistent = all_consistent && consistent;
        const double med = median(times);
        const double speedup = baseline[cfg.alg] / med;
        const std::string label = config_line(cfg).substr(0, config_line(cfg).find(' '));
        std::snprintf(line, sizeof line, "%-34s %7zu %11.2f %9.1f %9.2f  %s\n", label.c_str(), w, med,
                      mib / (med / 1000.0), speedup,
                      consistent ? (digest.substr(0, 16) + "..").c_str() : "MISMATCH");
        os << line;
        cells.push_back({{"model", bm.label},
                         {"config", label},
                         {"block_size", cfg.block_size},
                         {"workers", w},
                         {"median_ms", med},
                         {"speedup_vs_baseline", speedup},
                         {"digest", digest},
                         {"consistent", consistent}});
      }
    }
  }
  os << "\n" << (all_consistent ? "all digests consistent across worker counts"
                                : "DIGEST MISMATCH across worker counts") << "\n";
  emit(g, {{"cells", cells}, {"consistent", all_consistent}}, os.str());
  return all_consistent ? kExitOk : kExitVerifyFailed;
}

int run(int argc, char** argv) {
  CLI::App app{"sentinel: parallel model and dataset authentication with signed attestations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "machine-readable output");
  app.add_option("--workers", g.workers, "worker threads (default: logical cores; SENTINEL_WORKERS overrides)");

  KeygenArgs keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "generate a P-256 signing key pair");
  keygen_cmd->add_option("--out", keygen.out, "output prefix; writes PREFIX.key and PREFIX.pub")->required();
  keygen_cmd->add_flag("--force", keygen.force, "overwrite existing key files");

  SignModelArgs sign_model;
  auto* sign_model_cmd = app.add_subcommand("sign-model", "hash a model and write a signed attestation bundle");
  sign_model_cmd->add_option("--model", sign_model.model, "model manifest (JSON)")->required();
  sign_model_cmd->add_option("--key", sign_model.key, "private key (PEM)")->required();
  sign_model_cmd->add_option("--out", sign_model.out, "bundle path")->required();
  sign_model_cmd->add_option("--name", sign_model.name, "subject name (default: manifest stem)");
  sign_model.flags.attach(sign_model_cmd);

  VerifyModelArgs verify_model;
  auto* verify_model_cmd = app.add_subcommand("verify-model", "verify a model against its bundle");
  verify_model_cmd->add_option("--model", verify_model.model, "model manifest (JSON)")->required();
  verify_model_cmd->add_option("--bundle", verify_model.bundle, "bundle path")->required();
  verify_model_cmd->add_option("--pubkey", verify_model.pubkey, "require this signer (PEM public key)");
  verify_model.flags.attach(verify_model_cmd);

  SignDatasetArgs sign_dataset;
  auto* sign_dataset_cmd = app.add_subcommand("sign-dataset", "digest a dataset and write one bundle per source");
  sign_dataset_cmd->add_option("--dataset", sign_dataset.dataset, "dataset manifest (JSON)")->required();
  sign_dataset_cmd->add_option("--key", sign_dataset.key, "private key (PEM)")->required();
  sign_dataset_cmd->add_option("--out-dir", sign_dataset.out_dir, "directory for source-<id>.bundle.json")
      ->required();
  sign_dataset_cmd->add_option("--batch-size", sign_dataset.batch_size, "samples per batch")->capture_default_str();
  sign_dataset_cmd->add_option("--shuffle-seed", sign_dataset.seed, "shuffle seed")->capture_default_str();
  sign_dataset_cmd->add_flag("--cover-labels", sign_dataset.cover_labels, "bind labels into sample digests");

  VerifyDatasetArgs verify_dataset;
  auto* verify_dataset_cmd = app.add_subcommand("verify-dataset", "verify a dataset against per-source bundles");
  verify_dataset_cmd->add_option("--dataset", verify_dataset.dataset, "dataset manifest (JSON)")->required();
  verify_dataset_cmd->add_option("--bundles", verify_dataset.bundles, "bundle files or directories");
  verify_dataset_cmd->add_option("--pubkey", verify_dataset.pubkey, "require this signer (PEM public key)");
  verify_dataset_cmd->add_option("--batch-size", verify_dataset.batch_size, "samples per batch")
      ->capture_default_str();
  verify_dataset_cmd->add_option("--shuffle-seed", verify_dataset.seed, "shuffle seed")->capture_default_str();

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "print a bundle and its statement");
  inspect_cmd->add_option("bundle", inspect_path, "bundle path")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "time every hashing configuration on synthetic models");
  bench_cmd->add_option("--sizes", bench.sizes, "model shapes (resnet152, bert, gpt2, vgg19, gpt2-xl) or LAYERSxMIB")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--scale", bench.scale, "size multiplier for named shapes")->capture_default_str();
  bench_cmd->add_option("--workers", bench.workers, "worker counts to time, e.g. 1,2,4 (1 is always included)")
      ->delimiter(',');
  bench_cmd->add_option("--repeats", bench.repeats, "runs per cell (>= 5)")->capture_default_str();
  bench_cmd->add_option("--constructions", bench.constructions)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--compressions", bench.compressions, "Merkle compression functions")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--strategies", bench.strategies)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--block-size", bench.block_size)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();

  SynthModelArgs synth_model;
  auto* synth_model_cmd = app.add_subcommand("synth-model", "write a seeded synthetic model");
  synth_model_cmd->add_option("--out", synth_model.out, "manifest path")->required();
  synth_model_cmd->add_option("--shape", synth_model.shape, "reference shape name");
  synth_model_cmd->add_option("--scale", synth_model.scale, "size multiplier for --shape")->capture_default_str();
  synth_model_cmd->add_option("--layers", synth_model.layers)->capture_default_str();
  synth_model_cmd->add_option("--size-mib", synth_model.size_mib)->capture_default_str();
  synth_model_cmd->add_option("--seed", synth_model.seed)->capture_default_str();

  SynthDatasetArgs synth_dataset;
  auto* synth_dataset_cmd = app.add_subcommand("synth-dataset", "write a seeded synthetic dataset");
  synth_dataset_cmd->add_option("--out", synth_dataset.out, "manifest path")->required();
  synth_dataset_cmd->add_option("--count", synth_dataset.count)->capture_default_str();
  synth_dataset_cmd->add_option("--sources", synth_dataset.sources)->capture_default_str();
  synth_dataset_cmd->add_option("--sample-size", synth_dataset.sample_size, "bytes per sample (0: random)")
      ->capture_default_str();
  synth_dataset_cmd->add_option("--seed", synth_dataset.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*keygen_cmd) return cmd_keygen(g, keygen);
    if (*sign_model_cmd) return cmd_sign_model(g, sign_model);
    if (*verify_model_cmd) {
      bool flags_given = false;
      for (const char* f : {"--construction", "--compression", "--strategy", "--block-size", "--ordered"}) {
        flags_given = flags_given || verify_model_cmd->count(f) > 0;
      }
      return cmd_verify_model(g, verify_model, flags_given);
    }
    if (*sign_dataset_cmd) return cmd_sign_dataset(g, sign_dataset);
    if (*verify_dataset_cmd) return cmd_verify_dataset(g, verify_dataset);
    if (*inspect_cmd) return cmd_inspect(g, inspect_path);
    if (*bench_cmd) return cmd_bench(g, bench);
    if (*synth_model_cmd) return cmd_synth_model(g, synth_model);
    if (*synth_dataset_cmd) return cmd_synth_dataset(g, synth_dataset);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace sentinel::cli

int main(int argc, char** argv) { return sentinel::cli::run(argc, argv); }
