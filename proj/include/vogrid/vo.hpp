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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vogrid/config.hpp"
#include "vogrid/time.hpp"

namespace vogrid {

// Static description of one Virtual Organization: people, roles, sites,
// services, software and policies. Loaded once at startup and cached;
// hot-reload is out of scope.

struct UserDef {
  std::string name;
  std::vector<std::string> groups;
  std::vector<std::string> roles;
  std::string home;  // default /users/<name>
};

struct SiteDef {
  std::string name;
  std::string partition;
  bool is_private = false;  // reachable only through the site gateway
};

struct CeDef {
  std::string name;
  std::string site;
  std::string platform;
  int max_slots = 1;
  std::vector<std::string> close_se;
  Ticks poll_interval = 30 * kTicksPerSecond;
  std::string batch = "immediate";  // immediate | fifo | failinject:<rate>
};

struct SeDef {
  std::string name;
  std::string site;
  std::uint64_t capacity = 0;
  std::string storage_class = "disk";
  bool vo_store = false;  // holds VO bookkeeping files (JDL, JIO, task objects)
};

struct PackageRef {
  std::string name;
  std::string version;  // "" means any

  bool any() const { return version.empty(); }
  std::string display() const { return name + "::" + (any() ? "any" : version); }

  /// Parses "ROOT::3.05", "ROOT::any" or "ROOT".
  static PackageRef parse(const std::string& text);
};

struct PackageDef {
  std::string name;
  std::string version;  // dotted numeric, totally ordered by numeric components
  std::vector<PackageRef> depends;
  std::string payload_lfn;  // optional tarball reference in the catalogue
  std::string setup_hook;   // environment note recorded in the install log
  std::string post_hook;

  std::string key() const { return name + "::" + version; }
};

enum class ValidationKind { None, OutputsNonzero };
enum class ExecKind { Fixed, Analysis };

/// Deterministic simulated execution profile attached to each command.
struct ExecProfile {
  ExecKind kind = ExecKind::Fixed;
  Ticks duration = 60 * kTicksPerSecond;
  Ticks per_file = 0;  // extra time per input file
  std::vector<std::pair<std::string, std::uint64_t>> produces;  // (name, bytes)
  double fail_rate = 0.0;
  std::uint64_t seed = 0;
  int nbins = 16;  // analysis histogram shape
  double lo = 0.0, hi = 1.0;
};

struct CommandDef {
  std::string name;
  std::string version = "1.0";
  std::vector<PackageRef> packages;
  ValidationKind validation = ValidationKind::None;
  ExecProfile profile;
};

struct PartitionDef {
  std::string name;
  std::vector<std::string> sites;
};

struct PolicyRule {
  enum class Kind { RolePriority, UserCap };
  Kind kind;
  std::string name;
  std::string role;  // RolePriority
  int priority = 0;
  std::string user;  // UserCap
  int max_active = 0;
};

/// Compares dotted numeric versions ("3.02.07" < "3.05"); missing components
/// count as zero.
int compare_versions(const std::string& a, const std::string& b);

class VoConfig {
 public:
  static VoConfig load(const ConfigDoc& doc);
  static VoConfig load_file(const std::string& path);

  const UserDef* user(const std::string& name) const;
  const SiteDef* site(const std::string& name) const;
  const CeDef* ce(const std::string& name) const;
  const SeDef* se(const std::string& name) const;
  const CommandDef* command(const std::string& name) const;
  const PackageDef* package(const std::string& name, const std::string& version) const;

  /// Highest available version of a package name, nullptr when unknown.
  const PackageDef* highest_package(const std::string& name) const;

  bool has_se(const std::string& name) const { return se(name) != nullptr; }
  std::string home_of(const std::string& user) const;

  /// Name of the storage element that keeps VO bookkeeping files.
  std::string vo_store_se() const;

  const std::map<std::string, UserDef>& users() const { return users_; }
  const std::map<std::string, SiteDef>& sites() const { return sites_; }
  const std::map<std::string, CeDef>& ces() const { return ces_; }
  const std::map<std::string, SeDef>& ses() const { return ses_; }
  const std::map<std::string, CommandDef>& commands() const { return commands_; }
  const std::map<std::string, std::map<std::string, PackageDef>>& packages() const {
    return packages_;
  }
  const std::map<std::string, PartitionDef>& partitions() const { return partitions_; }
  const std::vector<PolicyRule>& policies() const { return policies_; }

  std::string partition_of_site(const std::string& site) const;

  /// Dynamically registers a federated CE/SE pair; throws NameClash.
  void add_federated(const CeDef& ce, const SeDef& se);

 private:
  void validate() const;

  std::map<std::string, UserDef> users_;
  std::vector<std::string> groups_;
  std::vector<std::string> roles_;
  std::map<std::string, SiteDef> sites_;
  std::map<std::string, CeDef> ces_;
  std::map<std::string, SeDef> ses_;
  std::map<std::string, std::map<std::string, PackageDef>> packages_;  // name -> version -> def
  std::map<std::string, CommandDef> commands_;
  std::map<std::string, PartitionDef> partitions_;
  std::vector<PolicyRule> policies_;
};

}  // namespace vogrid
