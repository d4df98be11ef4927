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

// Model manifests: a JSON index
//   {"tensors":[{"name":..., "offset":..., "length":...}, ...], "data":"<path>"}
// next to a raw binary file. "data" is resolved relative to the manifest.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "sentinel/error.hpp"
#include "sentinel/model.hpp"

namespace sentinel {

namespace detail {

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  Bytes out(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size))) {
    throw IoError("cannot read " + path.string());
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, as_bytes(text));
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  Bytes raw = read_file(path);
  try {
    return nlohmann::json::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

/// Loads a model, copying each tensor into its own allocation.
inline TensorMap load_model(const std::filesystem::path& manifest_path) {
  const nlohmann::json doc = detail::read_json(manifest_path);
  TensorMap model;
  try {
    const auto data_path = manifest_path.parent_path() / doc.at("data").get<std::string>();
    const Bytes data = detail::read_file(data_path);
    for (const auto& t : doc.at("tensors")) {
      const auto name = t.at("name").get<std::string>();
      const auto offset = t.at("offset").get<std::uint64_t>();
      const auto length = t.at("length").get<std::uint64_t>();
      if (offset > data.size() || length > data.size() - offset) {
        throw FormatError("tensor " + name + " lies outside " + data_path.string());
      }
      model.add(name, Bytes(data.begin() + static_cast<std::ptrdiff_t>(offset),
                            data.begin() + static_cast<std::ptrdiff_t>(offset + length)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  return model;
}

/// Writes the tensors back to back into data_name (next to the manifest).
inline void save_model(const TensorMap& model, const std::filesystem::path& manifest_path,
                       const std::string& data_name) {
  nlohmann::json tensors = nlohmann::json::array();
  Bytes data;
  data.reserve(model.total_bytes());
  for (const auto& e : model.entries()) {
    tensors.push_back({{"name", e.name}, {"offset", data.size()}, {"length", e.data.size()}});
    data.insert(data.end(), e.data.begin(), e.data.end());
  }
  detail::write_file(manifest_path.parent_path() / data_name, data);
  nlohmann::json doc = {{"tensors", tensors}, {"data", data_name}};
  detail::write_text(manifest_path, doc.dump(2) + "\n");
}

}  // namespace sentinel
