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

#ifndef F2VS_RUNCONFIG_HPP
#define F2VS_RUNCONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace f2vs {

// Flat key=value configuration. Keys are namespaced by convention
// ("stage1.epochs", "dcts.n_pairs"); values stay strings until a typed
// getter parses them, so a bad value is reported with its key.
class RunConfig {
 public:
  RunConfig() = default;

  // Parses "key=value" lines. '#' starts a comment, blank lines are
  // skipped, whitespace around key and value is trimmed, the first '='
  // splits, and a repeated key keeps the last value.
  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws ValidationError naming the first key not in `known`.
  void check_known(const std::vector<std::string>& known) const;

  // Sorted "key=value" lines; rendering twice gives identical bytes.
  std::string render() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace f2vs

#endif  // F2VS_RUNCONFIG_HPP
