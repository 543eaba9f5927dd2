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


#include "flexload_cli/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "flexload/types.hpp"
#include "json.hpp"

#ifndef FLEXLOAD_VERSION
#define FLEXLOAD_VERSION "0.0.0"
#endif

namespace flexload::cli {
namespace {

using nlohmann::json;

json config_object(const std::vector<std::pair<std::string, std::string>>& config) {
  json j = json::object();
  for (const auto& [k, v] : config) j[k] = json::parse(v);
  return j;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void RunManifest::set(std::string key, std::string value) {
  config_.emplace_back(std::move(key), json(value).dump());
}

void RunManifest::set(std::string key, double value) {
  config_.emplace_back(std::move(key), json(value).dump());
}

void RunManifest::set(std::string key, std::int64_t value) {
  config_.emplace_back(std::move(key), json(value).dump());
}

void RunManifest::set_input(std::string key, const std::filesystem::path& path) {
  set(std::move(key), "fnv1a:" + hex64(fnv1a(read_file(path))));
}

void RunManifest::add_output(const std::filesystem::path& path, std::string_view bytes) {
  outputs_.emplace_back(path.filename().string(), hex64(fnv1a(bytes)));
}

void RunManifest::add_timing_output(const std::filesystem::path& path) {
  outputs_.emplace_back(path.filename().string(), "timing");
}

std::string RunManifest::config_digest() const {
  return hex64(fnv1a(subcommand_ + "\n" + config_object(config_).dump()));
}

std::string RunManifest::to_json() const {
  json outputs = json::array();
  for (const auto& [name, digest] : outputs_) {
    outputs.push_back({{"file", name}, {"fnv1a", digest}});
  }
  const json j = {{"subcommand", subcommand_},
                  {"tool_version", FLEXLOAD_VERSION},
                  {"seed", seed_},
                  {"config", config_object(config_)},
                  {"config_digest", config_digest()},
                  {"outputs", outputs}};
  return j.dump(2) + "\n";
}

}  // namespace flexload::cli
