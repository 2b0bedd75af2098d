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
#include <vector>

#include <json.hpp>

namespace vogrid {

/// Append-only operation journal with an optional snapshot prefix. Records
/// are JSON lines; replaying snapshot + records is deterministic. The format
/// is versioned via the header line.
class Journal {
 public:
  static constexpr int kVersion = 1;

  void append(const nlohmann::json& record);
  void set_snapshot(const nlohmann::json& snap);

  const std::optional<nlohmann::json>& snapshot() const { return snapshot_; }
  const std::vector<std::string>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  void clear_records() { records_.clear(); }

  /// Binds the journal to <base>.snapshot and <base>.journal on disk.
  /// Existing contents are loaded; subsequent appends go straight to disk.
  void attach_files(const std::string& base);
  /// Flushes snapshot + records to the attached files (no-op when detached).
  void sync() const;

  std::string serialize() const;
  static Journal deserialize(const std::string& text);

 private:
  std::optional<nlohmann::json> snapshot_;
  std::vector<std::string> records_;
  std::string file_base_;
};

}  // namespace vogrid
