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

#include "vogrid/vo.hpp"

#include <algorithm>
#include <set>

#include "vogrid/errors.hpp"
#include "vogrid/util.hpp"

namespace vogrid {

PackageRef PackageRef::parse(const std::string& text) {
  auto pos = text.find("::");
  if (pos == std::string::npos) return PackageRef{text, ""};
  std::string name = text.substr(0, pos);
  std::string ver = text.substr(pos + 2);
  if (name.empty()) fail(Errc::ParseError, "bad package reference '" + text + "'");
  if (iequals(ver, "any")) ver.clear();
  return PackageRef{name, ver};
}

int compare_versions(const std::string& a, const std::string& b) {
  auto pa = split(a, '.'), pb = split(b, '.');
  std::size_t n = std::max(pa.size(), pb.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t va = i < pa.size() ? parse_int(pa[i]).value_or(0) : 0;
    std::int64_t vb = i < pb.size() ? parse_int(pb[i]).value_or(0) : 0;
    if (va != vb) return va < vb ? -1 : 1;
  }
  return 0;
}

namespace {

ValidationKind parse_validation(const std::string& v, int line) {
  if (v == "none" || v.empty()) return ValidationKind::None;
  if (v == "outputs_nonzero") return ValidationKind::OutputsNonzero;
  fail(Errc::ParseError, "line " + std::to_string(line) + ": unknown validation kind '" + v + "'");
}

std::vector<PackageRef> parse_refs(const std::vector<std::string>& items) {
  std::vector<PackageRef> out;
  for (const auto& s : items) out.push_back(PackageRef::parse(s));
  return out;
}

std::vector<std::pair<std::string, std::uint64_t>> parse_produces(const std::string& spec, int line) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  if (spec.empty()) return out;
  for (const auto& item : split(spec, ',')) {
    auto colon = item.rfind(':');
    if (colon == std::string::npos)
      fail(Errc::ParseError, "line " + std::to_string(line) + ": produces item '" + item +
                                 "' is not name:bytes");
    auto size = parse_uint(item.substr(colon + 1));
    if (!size)
      fail(Errc::ParseError, "line " + std::to_string(line) + ": bad size in '" + item + "'");
    out.emplace_back(item.substr(0, colon), *size);
  }
  return out;
}

}  // namespace

VoConfig VoConfig::load_file(const std::string& path) {
  return load(ConfigDoc::parse_file(path));
}

VoConfig VoConfig::load(const ConfigDoc& doc) {
  VoConfig vo;

  if (const auto* sec = doc.find("groups"))
    for (const auto& e : sec->entries) vo.groups_.push_back(e.name);
  if (const auto* sec = doc.find("roles"))
    for (const auto& e : sec->entries) vo.roles_.push_back(e.name);

  if (const auto* sec = doc.find("users")) {
    for (const auto& e : sec->entries) {
      UserDef u;
      u.name = e.name;
      u.groups = e.get_list("groups");
      u.roles = e.get_list("roles");
      u.home = e.get_or("home", "/users/" + e.name);
      vo.users_[u.name] = std::move(u);
    }
  }

  if (const auto* sec = doc.find("sites")) {
    for (const auto& e : sec->entries) {
      SiteDef s;
      s.name = e.name;
      s.partition = e.get_or("partition", "");
      s.is_private = e.get_bool_or("private", false);
      vo.sites_[s.name] = std::move(s);
    }
  }

  if (const auto* sec = doc.find("computing_elements")) {
    for (const auto& e : sec->entries) {
      CeDef ce;
      ce.name = e.name;
      ce.site = e.get("site");
      ce.platform = e.get_or("platform", "any");
      ce.max_slots = static_cast<int>(e.get_int_or("max_slots", 1));
      ce.close_se = e.get_list("close_se");
      ce.poll_interval = parse_seconds(e.get_or("poll", "30"));
      ce.batch = e.get_or("batch", "immediate");
      vo.ces_[ce.name] = std::move(ce);
    }
  }

  if (const auto* sec = doc.find("storage_elements")) {
    for (const auto& e : sec->entries) {
      SeDef se;
      se.name = e.name;
      se.site = e.get("site");
      se.capacity = e.get_uint("capacity");
      se.storage_class = e.get_or("class", "disk");
      se.vo_store = e.get_bool_or("vo_store", false);
      vo.ses_[se.name] = std::move(se);
    }
  }

  if (const auto* sec = doc.find("packages")) {
    for (const auto& e : sec->entries) {
      PackageRef ref = PackageRef::parse(e.name);
      if (ref.any())
        fail(Errc::ParseError,
             "line " + std::to_string(e.line) + ": package entry '" + e.name +
                 "' needs an explicit version (name::version)");
      PackageDef p;
      p.name = ref.name;
      p.version = ref.version;
      for (const auto& part : split(p.version, '.'))
        if (!parse_uint(part))
          fail(Errc::ParseError, "line " + std::to_string(e.line) + ": version '" + p.version +
                                     "' is not dotted numeric");
      p.depends = parse_refs(e.get_list("depends"));
      p.payload_lfn = e.get_or("payload", "");
      p.setup_hook = e.get_or("setup", "");
      p.post_hook = e.get_or("post", "");
      vo.packages_[p.name][p.version] = std::move(p);
    }
  }

  if (const auto* sec = doc.find("commands")) {
    for (const auto& e : sec->entries) {
      CommandDef c;
      c.name = e.name;
      c.version = e.get_or("version", "1.0");
      c.packages = parse_refs(e.get_list("packages"));
      c.validation = parse_validation(e.get_or("validation", "none"), e.line);
      std::string kind = e.get_or("kind", "fixed");
      if (kind == "fixed")
        c.profile.kind = ExecKind::Fixed;
      else if (kind == "analysis")
        c.profile.kind = ExecKind::Analysis;
      else
        fail(Errc::ParseError, "line " + std::to_string(e.line) + ": unknown command kind '" + kind + "'");
      c.profile.duration = parse_seconds(e.get_or("duration", "60"));
      c.profile.per_file = parse_seconds(e.get_or("per_file", "0"));
      c.profile.produces = parse_produces(e.get_or("produces", ""), e.line);
      c.profile.fail_rate = e.get_real_or("fail_rate", 0.0);
      c.profile.seed = e.has("seed") ? e.get_uint("seed") : fnv1a(c.name);
      c.profile.nbins = static_cast<int>(e.get_int_or("nbins", 16));
      c.profile.lo = e.get_real_or("lo", 0.0);
      c.profile.hi = e.get_real_or("hi", 1.0);
      vo.commands_[c.name] = std::move(c);
    }
  }

  if (const auto* sec = doc.find("grid_partitions")) {
    for (const auto& e : sec->entries) {
      PartitionDef p;
      p.name = e.name;
      p.sites = e.get_list("sites");
      vo.partitions_[p.name] = std::move(p);
    }
  }

  if (const auto* sec = doc.find("policies")) {
    for (const auto& e : sec->entries) {
      PolicyRule r;
      r.name = e.name;
      std::string kind = e.get("kind");
      if (kind == "role_priority") {
        r.kind = PolicyRule::Kind::RolePriority;
        r.role = e.get("role");
        r.priority = static_cast<int>(e.get_int("priority"));
      } else if (kind == "user_cap") {
        r.kind = PolicyRule::Kind::UserCap;
        r.user = e.get("user");
        r.max_active = static_cast<int>(e.get_int("max_active"));
      } else {
        fail(Errc::ParseError, "line " + std::to_string(e.line) + ": unknown policy kind '" + kind + "'");
      }
      vo.policies_.push_back(std::move(r));
    }
  }

  vo.validate();
  return vo;
}

void VoConfig::validate() const {
  auto known_group = [&](const std::string& g) {
    return std::find(groups_.begin(), groups_.end(), g) != groups_.end();
  };
  auto known_role = [&](const std::string& r) {
    return std::find(roles_.begin(), roles_.end(), r) != roles_.end();
  };
  for (const auto& [name, u] : users_) {
    for (const auto& g : u.groups)
      if (!known_group(g)) fail(Errc::ParseError, "user '" + name + "' references unknown group '" + g + "'");
    for (const auto& r : u.roles)
      if (!known_role(r)) fail(Errc::ParseError, "user '" + name + "' references unknown role '" + r + "'");
  }
  for (const auto& [name, ce] : ces_) {
    if (!sites_.count(ce.site))
      fail(Errc::ParseError, "computing element '" + name + "' references unknown site '" + ce.site + "'");
    for (const auto& se : ce.close_se)
      if (!ses_.count(se))
        fail(Errc::ParseError, "computing element '" + name + "' references unknown SE '" + se + "'");
  }
  for (const auto& [name, se] : ses_)
    if (!sites_.count(se.site))
      fail(Errc::ParseError, "storage element '" + name + "' references unknown site '" + se.site + "'");
  for (const auto& [pname, versions] : packages_) {
    for (const auto& [ver, p] : versions) {
      for (const auto& dep : p.depends) {
        if (!packages_.count(dep.name))
          fail(Errc::ParseError, "package " + p.key() + " depends on unknown package '" + dep.name + "'");
        if (!dep.any() && !packages_.at(dep.name).count(dep.version))
          fail(Errc::ParseError, "package " + p.key() + " depends on unknown version " + dep.display());
      }
    }
  }
  for (const auto& [cname, c] : commands_) {
    for (const auto& dep : c.packages) {
      if (!packages_.count(dep.name))
        fail(Errc::ParseError, "command '" + cname + "' references unknown package '" + dep.name + "'");
      if (!dep.any() && !packages_.at(dep.name).count(dep.version))
        fail(Errc::ParseError, "command '" + cname + "' references unknown version " + dep.display());
    }
  }
  for (const auto& [pname, part] : partitions_)
    for (const auto& s : part.sites)
      if (!sites_.count(s))
        fail(Errc::ParseError, "partition '" + pname + "' references unknown site '" + s + "'");
  for (const auto& rule : policies_) {
    if (rule.kind == PolicyRule::Kind::RolePriority && !known_role(rule.role))
      fail(Errc::ParseError, "policy '" + rule.name + "' references unknown role '" + rule.role + "'");
    if (rule.kind == PolicyRule::Kind::UserCap && !users_.count(rule.user))
      fail(Errc::ParseError, "policy '" + rule.name + "' references unknown user '" + rule.user + "'");
  }

  // Dependency graph must be acyclic. DFS over (name, version) nodes with
  // "any" edges resolved to the highest version.
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> marks;
  std::vector<std::pair<std::string, std::string>> stack;
  for (const auto& [pname, versions] : packages_)
    for (const auto& [ver, p] : versions) stack.emplace_back(pname, ver);

  std::function<void(const PackageDef&)> visit = [&](const PackageDef& p) {
    Mark& m = marks[p.key()];
    if (m == Mark::Black) return;
    if (m == Mark::Grey) fail(Errc::CycleDetected, "package dependency cycle through " + p.key());
    m = Mark::Grey;
    for (const auto& dep : p.depends) {
      const PackageDef* d = dep.any() ? highest_package(dep.name) : package(dep.name, dep.version);
      if (d) visit(*d);
    }
    marks[p.key()] = Mark::Black;
  };
  for (const auto& [pname, ver] : stack) visit(packages_.at(pname).at(ver));
}

const UserDef* VoConfig::user(const std::string& name) const {
  auto it = users_.find(name);
  return it == users_.end() ? nullptr : &it->second;
}

const SiteDef* VoConfig::site(const std::string& name) const {
  auto it = sites_.find(name);
  return it == sites_.end() ? nullptr : &it->second;
}

const CeDef* VoConfig::ce(const std::string& name) const {
  auto it = ces_.find(name);
  return it == ces_.end() ? nullptr : &it->second;
}

const SeDef* VoConfig::se(const std::string& name) const {
  auto it = ses_.find(name);
  return it == ses_.end() ? nullptr : &it->second;
}

const CommandDef* VoConfig::command(const std::string& name) const {
  auto it = commands_.find(name);
  return it == commands_.end() ? nullptr : &it->second;
}

const PackageDef* VoConfig::package(const std::string& name, const std::string& version) const {
  auto it = packages_.find(name);
  if (it == packages_.end()) return nullptr;
  auto vit = it->second.find(version);
  return vit == it->second.end() ? nullptr : &vit->second;
}

const PackageDef* VoConfig::highest_package(const std::string& name) const {
  auto it = packages_.find(name);
  if (it == packages_.end() || it->second.empty()) return nullptr;
  const PackageDef* best = nullptr;
  for (const auto& [ver, def] : it->second)
    if (!best || compare_versions(ver, best->version) > 0) best = &def;
  return best;
}

std::string VoConfig::home_of(const std::string& u) const {
  const UserDef* def = user(u);
  return def ? def->home : "/users/" + u;
}

std::string VoConfig::vo_store_se() const {
  for (const auto& [name, se] : ses_)
    if (se.vo_store) return name;
  return ses_.empty() ? "" : ses_.begin()->first;
}

std::string VoConfig::partition_of_site(const std::string& site) const {
  auto it = sites_.find(site);
  return it == sites_.end() ? "" : it->second.partition;
}

void VoConfig::add_federated(const CeDef& ce, const SeDef& se) {
  if (ces_.count(ce.name) || ses_.count(ce.name)) fail(Errc::NameClash, "CE name '" + ce.name + "' already in use");
  if (ses_.count(se.name) || ces_.count(se.name)) fail(Errc::NameClash, "SE name '" + se.name + "' already in use");
  if (!sites_.count(ce.site)) fail(Errc::UnknownTarget, "site '" + ce.site + "' not in VO config");
  ces_[ce.name] = ce;
  ses_[se.name] = se;
}

}  // namespace vogrid
