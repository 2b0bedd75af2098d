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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vogrid/auth.hpp"
#include "vogrid/errors.hpp"
#include "vogrid/journal.hpp"
#include "vogrid/time.hpp"
#include "vogrid/vo.hpp"

namespace vogrid {

// Hierarchical logical file namespace. Entries (LFNs) map to replica lists
// (PFNs); directories carry unix-style rwx triplets and may host typed tag
// tables queried through `lfn://host/pattern?Tag:predicate`. Each directory
// has its own entry table, and tables are assigned to shards; shard
// placement is invisible to every lookup.

struct FileId {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  auto operator<=>(const FileId&) const = default;

  bool valid() const { return hi != 0 || lo != 0; }
  std::string str() const;
};

enum class EntryKind { File, Directory, Symlink, Proc };

inline bool is_dir_kind(EntryKind k) { return k == EntryKind::Directory || k == EntryKind::Proc; }

struct PhysicalLocation {
  std::string se;
  std::string protocol;
  std::string path;
  auto operator<=>(const PhysicalLocation&) const = default;
};

/// 9-bit rwx triplet (owner, group, other), stored like a unix mode.
struct Perms {
  unsigned bits = 0;

  static Perms parse(const std::string& text);  // "rwxr-x---" or octal "750"
  std::string str() const;

  bool allows(int who, char mode) const {  // who: 0 owner, 1 group, 2 other
    int shift = (2 - who) * 3;
    unsigned triplet = (bits >> shift) & 7u;
    switch (mode) {
      case 'r': return triplet & 4u;
      case 'w': return triplet & 2u;
      case 'x': return triplet & 1u;
    }
    return false;
  }
  auto operator<=>(const Perms&) const = default;
};

struct CatalogueEntry {
  FileId id;
  std::string name;  // path segment, no '/'
  EntryKind kind = EntryKind::File;
  std::string owner;
  std::string group;
  Perms perms;
  std::uint64_t size = 0;                   // files only
  std::vector<PhysicalLocation> replicas;   // files only
  std::string link_target;                  // symlinks only
};

enum class TagAttrType { Int, Float, String };

using TagValue = std::variant<std::int64_t, double, std::string>;

struct TagSchema {
  std::vector<std::pair<std::string, TagAttrType>> attrs;
};

struct TagTable {
  TagSchema schema;
  std::map<std::string, std::vector<TagValue>> rows;  // keyed by entry name
};

// --- query language ---------------------------------------------------------

struct TagComparison {
  std::string attr;
  enum class Op { Eq, Ne, Lt, Le, Gt, Ge } op;
  TagValue literal;
};

struct TagPredicate {
  // comparisons joined left-to-right by and/or; connective[i] joins
  // terms[i] and terms[i+1]
  std::vector<TagComparison> terms;
  std::vector<bool> connective_is_and;

  bool eval(const TagSchema& schema, const std::vector<TagValue>& row) const;
};

struct LfnQuery {
  std::string host;     // empty means the local VO
  std::string pattern;  // absolute path pattern; * and % match within a segment
  std::optional<std::string> tag;
  std::optional<TagPredicate> predicate;

  static LfnQuery parse(const std::string& text);
  std::string str() const;
};

/// True when the path segment matches the pattern segment; `*` and `%` both
/// match any run of characters within the segment.
bool segment_match(const std::string& pattern, const std::string& segment);

// --- catalogue --------------------------------------------------------------

class Catalogue {
 public:
  using JobExistsFn = std::function<bool(std::int64_t)>;

  Catalogue(const VoConfig* vo, TimeFn now, Journal* journal = nullptr);

  void set_job_exists(JobExistsFn fn) { job_exists_ = std::move(fn); }

  // Namespace operations. All paths are absolute, '/'-separated LFNs.
  CatalogueEntry mkdir(const std::string& path, const Principal& p,
                       const std::string& shard_hint = "");
  FileId register_file(const std::string& lfn, const PhysicalLocation& loc, std::uint64_t size,
                       const Principal& p);
  CatalogueEntry add_replica(const std::string& lfn, const PhysicalLocation& loc,
                             const Principal& p);
  CatalogueEntry lookup(const std::string& lfn, const Principal& p) const;
  void rename(const std::string& src, const std::string& dst, const Principal& p);
  std::string create_proc_dir(std::int64_t job_id, const std::string& owner);
  void symlink(const std::string& link, const std::string& target, const Principal& p);
  void remove(const std::string& lfn, const Principal& p);
  /// Owner or admin may change the rwx triplets.
  void chmod(const std::string& lfn, Perms perms, const Principal& p);
  std::vector<CatalogueEntry> list_dir(const std::string& path, const Principal& p) const;

  // Metadata.
  void define_tag(const std::string& dir, const std::string& tag, const TagSchema& schema,
                  const Principal& p);
  void set_tag_values(const std::string& lfn, const std::string& tag,
                      const std::vector<std::pair<std::string, TagValue>>& values,
                      const Principal& p);
  std::vector<std::string> find(const LfnQuery& q, const Principal& p) const;
  std::vector<std::string> find(const std::string& query_text, const Principal& p) const;
  /// Tag tables attached to a directory (name -> table).
  std::map<std::string, TagTable> tags_of(const std::string& dir, const Principal& p) const;

  // Permissions.
  bool check_access(const std::string& lfn, const Principal& p, char mode) const;

  // Sharding.
  void move_subtree_to_shard(const std::string& dir, const std::string& shard,
                             const Principal& p);
  std::string shard_of(const std::string& dir) const;
  std::vector<std::string> shards() const;

  // Introspection and persistence.
  bool exists(const std::string& lfn) const;
  /// Every (path, entry) pair, sorted by path. Used by tests, snapshots and
  /// the shard-transparency checks.
  std::vector<std::pair<std::string, CatalogueEntry>> dump() const;
  nlohmann::json snapshot() const;
  void restore(const nlohmann::json& snap);
  /// Rebuilds state from a journal (snapshot, if present, then records).
  void replay(const Journal& j);
  /// Writes the current state into the journal as a fresh snapshot and
  /// truncates the record tail.
  void checkpoint();

  std::uint64_t replica_version() const { return replica_version_; }

 private:
  struct DirTable {
    FileId id;
    std::string shard;
    std::map<std::string, CatalogueEntry> entries;
    std::map<std::string, TagTable> tags;
  };

  struct Resolved {
    DirTable* parent;       // table containing the entry (null for root)
    CatalogueEntry* entry;  // borrowed pointer into the table
    std::string path;       // canonical absolute path of the entry
  };

  FileId fresh_id();
  static std::vector<std::string> components(const std::string& path);
  int relation(const CatalogueEntry& e, const Principal& p) const;  // 0 owner, 1 group, 2 other
  bool allowed(const CatalogueEntry& e, const Principal& p, char mode) const;
  void require(const CatalogueEntry& e, const Principal& p, char mode,
               const std::string& what) const;

  /// Walks to the entry; checks r+x on every traversed directory when
  /// `checked` is set. Follows symlinks in intermediate components and, when
  /// `follow_final`, the final one too (depth-capped).
  const Resolved resolve(const std::string& path, const Principal& p, bool checked,
                         bool follow_final, int depth = 0) const;

  DirTable& table_of(FileId id);
  const DirTable& table_of(FileId id) const;

  void record(const nlohmann::json& j);
  void apply(const nlohmann::json& j);

  void find_rec(const DirTable& dir, const std::string& prefix,
                const std::vector<std::string>& pattern, std::size_t depth, const Principal& p,
                const LfnQuery& q, std::vector<std::string>& out) const;
  void dump_rec(const DirTable& dir, const std::string& prefix,
                std::vector<std::pair<std::string, CatalogueEntry>>& out) const;

  const VoConfig* vo_;
  TimeFn now_;
  Journal* journal_;
  JobExistsFn job_exists_;

  CatalogueEntry root_;
  std::map<FileId, DirTable> dirs_;
  std::uint64_t next_id_ = 1;
  std::uint64_t replica_version_ = 0;  // bumped on register/add_replica/remove

  mutable std::recursive_mutex mu_;
};

std::string parent_path(const std::string& path);
std::string base_name(const std::string& path);
std::string join_path(const std::string& dir, const std::string& name);

}  // namespace vogrid
