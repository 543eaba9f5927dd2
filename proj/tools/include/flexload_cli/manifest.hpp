// Copyright 2026 The flexload Authors
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


#ifndef FLEXLOAD_CLI_MANIFEST_HPP_
#define FLEXLOAD_CLI_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flexload::cli {

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
// Writes via a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Record of one run. Only inputs that change the outputs go into the
// config (file inputs by content digest), so reruns produce the same
// manifest byte for byte wherever they write.
class RunManifest {
 public:
  explicit RunManifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::int64_t value);
  void set_input(std::string key, const std::filesystem::path& path);
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const std::filesystem::path& path, std::string_view bytes);
  // Wall-clock measurements differ run to run; listed without a digest.
  void add_timing_output(const std::filesystem::path& path);

  std::string config_digest() const;
  std::string to_json() const;

 private:
  std::string subcommand_;
  std::vector<std::pair<std::string, std::string>> config_;  // key -> JSON literal
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::string, std::string>> outputs_;  // name -> digest
};

}  // namespace flexload::cli

#endif  // FLEXLOAD_CLI_MANIFEST_HPP_
