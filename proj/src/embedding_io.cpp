// Copyright (c) 2026 The f2vs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "f2vs/embedding.hpp"

namespace f2vs {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void put_u16(std::ostream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

std::uint16_t get_u16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  if (!is) throw ValidationError("embedding file truncated");
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw ValidationError("embedding file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

float get_f32(std::istream& is) {
  const std::uint32_t bits = get_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

EmbeddingSet read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot open embedding file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ValidationError("bad magic in embedding file: " + path);
  }
  const std::uint32_t record_count = get_u32(is);
  const std::uint32_t dim = get_u32(is);
  const std::uint32_t label_count = get_u32(is);
  require(record_count > 0, "embedding file has no records: " + path);
  require(dim > 0, "embedding file has zero dimension: " + path);

  std::vector<std::string> names(label_count);
  std::vector<bool> seen(label_count, false);
  for (std::uint32_t i = 0; i < label_count; ++i) {
    const std::uint32_t id = get_u32(is);
    require(id < label_count && !seen[id],
            "invalid label table entry in " + path);
    seen[id] = true;
    const std::uint16_t len = get_u16(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    if (!is) throw ValidationError("embedding file truncated");
    names[id] = std::move(name);
  }

  EmbeddingSet::Builder builder(dim);
  std::vector<float> vec(dim);
  for (std::uint32_t r = 0; r < record_count; ++r) {
    const std::uint32_t label_id = get_u32(is);
    require(label_id < label_count, "record references unknown label id");
    for (std::uint32_t j = 0; j < dim; ++j) {
      vec[j] = get_f32(is);
      if (!std::isfinite(vec[j])) {
        throw ValidationError("non-finite value in embedding file: " + path);
      }
    }
    builder.add(names[label_id], vec);
  }
  return builder.build();
}

void write_binary(const EmbeddingSet& set, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), "cannot write embedding file: " + path);
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(set.size()));
  put_u32(os, static_cast<std::uint32_t>(set.dim()));
  put_u32(os, static_cast<std::uint32_t>(set.num_classes()));
  for (std::uint32_t id = 0; id < set.num_classes(); ++id) {
    const std::string& name = set.label_name(id);
    put_u32(os, id);
    put_u16(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (std::size_t r = 0; r < set.size(); ++r) {
    put_u32(os, set.label_id(r));
    for (float v : set.vec(r)) put_f32(os, v);
  }
  if (!os.good()) throw ValidationError("write failed: " + path);
}

// %.9g round-trips any float32 exactly.
void append_f32(std::string& out, float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  out += buf;
}

EmbeddingSet read_jsonl(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open embedding file: " + path);
  std::string line;
  std::size_t dim = 0;
  std::unique_ptr<EmbeddingSet::Builder> builder;
  std::size_t lineno = 0;
  std::vector<float> vec;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": bad JSON: " + e.what());
    }
    if (!obj.contains("label") || !obj["label"].is_string() ||
        !obj.contains("vec") || !obj["vec"].is_array()) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected {\"label\": str, \"vec\": [...]}");
    }
    const auto& arr = obj["vec"];
    if (builder == nullptr) {
      dim = arr.size();
      require(dim > 0, path + ": empty vector on first record");
      builder = std::make_unique<EmbeddingSet::Builder>(dim);
    }
    require(arr.size() == dim,
            path + ":" + std::to_string(lineno) + ": vector length " +
                std::to_string(arr.size()) + " != " + std::to_string(dim));
    vec.clear();
    for (const auto& x : arr) {
      require(x.is_number(), path + ": non-numeric vector entry");
      const double d = x.get<double>();
      if (!std::isfinite(d)) {
        throw ValidationError(path + ": non-finite value");
      }
      vec.push_back(static_cast<float>(d));
    }
    builder->add(obj["label"].get<std::string>(), vec);
  }
  require(builder != nullptr, "embedding file has no records: " + path);
  return builder->build();
}

void write_jsonl(const EmbeddingSet& set, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  require(os.good(), "cannot write embedding file: " + path);
  std::string line;
  for (std::size_t r = 0; r < set.size(); ++r) {
    line.clear();
    line += "{\"label\":";
    line += nlohmann::json(set.label_name(set.label_id(r))).dump();
    line += ",\"vec\":[";
    auto v = set.vec(r);
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j > 0) line += ',';
      append_f32(line, v[j]);
    }
    line += "]}\n";
    os << line;
  }
  if (!os.good()) throw ValidationError("write failed: " + path);
}

}  // namespace

EmbeddingSet read_embeddings(const std::string& path, EmbeddingFormat format) {
  return format == EmbeddingFormat::binary ? read_binary(path)
                                           : read_jsonl(path);
}

void write_embeddings(const EmbeddingSet& set, const std::string& path,
                      EmbeddingFormat format) {
  if (format == EmbeddingFormat::binary) {
    write_binary(set, path);
  } else {
    write_jsonl(set, path);
  }
}

}  // namespace f2vs
