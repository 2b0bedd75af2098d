/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vogrid {

// Line-oriented structured text used for the VO configuration, scenario
// files and serialized analysis tasks. See docs/formats.md for the schema.
//
//   [section]            or  [section arg]
//   name key=value key="quoted value" list=a,b,c
//   # comment

struct ConfigEntry {
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;
  int line = 0;

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws ParseError when absent
  std::string get_or(const std::string& key, const std::string& dflt) const;
  std::vector<std::string> get_list(const std::string& key) const;  // comma separated
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t dflt) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_real_or(const std::string& key, double dflt) const;
  bool get_bool_or(const std::string& key, bool dflt) const;

  void set(const std::string& key, const std::string& value);
};

struct ConfigSection {
  std::string kind;
  std::string arg;  // optional second token in the header, "" when absent
  std::vector<ConfigEntry> entries;
  int line = 0;

  const ConfigEntry* find(const std::string& name) const;
};

struct ConfigDoc {
  std::vector<ConfigSection> sections;

  static ConfigDoc parse(const std::string& text);
  static ConfigDoc parse_file(const std::string& path);

  /// Canonical rendering; parse(print(doc)) reproduces the document.
  std::string print() const;

  const ConfigSection* find(const std::string& kind, const std::string& arg = "") const;
  std::vector<const ConfigSection*> all(const std::string& kind) const;
  ConfigSection& add(const std::string& kind, const std::string& arg = "");
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace vogrid
