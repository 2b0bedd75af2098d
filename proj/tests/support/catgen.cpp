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

#include "support/catgen.hpp"

#include "support/fixtures.hpp"
#include "vogrid/config.hpp"

namespace catgen {

using namespace vogrid;

namespace {

const std::vector<std::string> kDirPerms = {
    "rwxr-xr-x", "rwxr-xr-x", "rwxr-xr-x", "rwxrwxrwx", "rwxr-x---",
    "rwx------", "r-xr-xr-x", "rwx--x--x", "rwxrwx---"};
const std::vector<std::string> kFilePerms = {
    "rw-r--r--", "rw-r--r--", "rw-------", "rw-rw----", "r--r--r--"};
const std::vector<std::string> kDirNames = {
    "sim", "rec", "2001-11", "2001-12", "2002-01", "V3.05", "V3.05.2", "V3.06",
    "prod", "run7", "data", "pass1"};
const std::vector<std::string> kFileStems = {"pbpb", "ev", "hij", "kine", "sum", "log"};

struct Builder {
  TwinCatalogue& tw;
  Rng& rng;
  std::vector<std::string> dirs{"/"};
  std::vector<std::string> files;
  int name_counter = 0;

  Principal& random_user() { return tw.as(rng.pick(tw.user_names)); }

  void mirror_chmod(const std::string& path, const Principal& p, bool is_dir) {
    const auto& palette = is_dir ? kDirPerms : kFilePerms;
    if (rng.chance(0.5)) {
      const std::string& perms = rng.pick(palette);
      tw.cat->chmod(path, Perms::parse(perms), p);
      tw.sh.set_perms(path, perms);
    }
  }

  bool try_mkdir(const std::string& path, Principal& p) {
    try {
      tw.cat->mkdir(path, p);
    } catch (const GridError&) {
      return false;
    }
    tw.sh.add_dir(path, p.user, p.primary_group(), "rwxr-xr-x");
    dirs.push_back(path);
    ++tw.entry_count;
    mirror_chmod(path, p, true);
    return true;
  }

  bool try_register(const std::string& path, Principal& p) {
    PhysicalLocation loc{rng.chance(0.5) ? "SE_CERN" : rng.chance(0.5) ? "SE_FZK" : "SE_Bari",
                         "sim", path};
    try {
      tw.cat->register_file(path, loc, 1000 + rng.below(1'000'000), p);
    } catch (const GridError&) {
      return false;
    }
    tw.sh.add_file(path, p.user, p.primary_group(), "rw-r--r--");
    files.push_back(path);
    ++tw.entry_count;
    mirror_chmod(path, p, false);
    return true;
  }

  void try_define_tag(const std::string& dir, Principal& p) {
    bool mc = rng.chance(0.5);
    std::string tag = mc ? "MonteCarlo" : "Quality";
    TagSchema schema;
    if (mc)
      schema.attrs = {{"npart", TagAttrType::Int}, {"energy", TagAttrType::Float}};
    else
      schema.attrs = {{"grade", TagAttrType::String}, {"run", TagAttrType::Int}};
    try {
      tw.cat->define_tag(dir, tag, schema, p);
    } catch (const GridError&) {
      return;
    }
    std::vector<std::pair<std::string, TagAttrType>> sh_schema(schema.attrs.begin(),
                                                               schema.attrs.end());
    tw.sh.define_tag(dir, tag, sh_schema);
  }

  void try_set_tag(const std::string& file, Principal& p) {
    bool mc = rng.chance(0.5);
    std::string tag = mc ? "MonteCarlo" : "Quality";
    std::vector<std::pair<std::string, TagValue>> values;
    std::vector<TagValue> row;
    if (mc) {
      std::int64_t npart = static_cast<std::int64_t>(rng.below(200));
      double energy = static_cast<double>(rng.below(1000)) / 10.0;
      values = {{"npart", TagValue(npart)}, {"energy", TagValue(energy)}};
      row = {TagValue(npart), TagValue(energy)};
    } else {
      static const std::vector<std::string> grades = {"good", "bad", "ugly"};
      std::string grade = rng.pick(grades);
      std::int64_t run = static_cast<std::int64_t>(1 + rng.below(20));
      values = {{"grade", TagValue(grade)}, {"run", TagValue(run)}};
      row = {TagValue(grade), TagValue(run)};
    }
    try {
      tw.cat->set_tag_values(file, tag, values, p);
    } catch (const GridError&) {
      return;
    }
    tw.sh.set_tag_row(file, tag, row);
  }

  std::string fresh_dir_name() {
    std::string base = rng.pick(kDirNames);
    if (rng.chance(0.4)) base += "." + std::to_string(name_counter++);
    return base;
  }

  std::string fresh_file_name() {
    std::string stem = rng.pick(kFileStems);
    switch (rng.below(3)) {
      case 0: return stem + "." + std::to_string(name_counter++) + ".root";
      case 1: return stem + std::to_string(name_counter++) + ".txt";
      default: return stem + "." + std::to_string(name_counter++) + ".sum.root";
    }
  }
};

}  // namespace

std::unique_ptr<TwinCatalogue> build_random_catalogue(std::uint64_t seed,
                                                      std::size_t target_entries) {
  auto tw = std::make_unique<TwinCatalogue>();
  tw->vo = VoConfig::load(ConfigDoc::parse(fixtures::small_vo_text()));
  tw->cat = std::make_unique<Catalogue>(&tw->vo, tw->clock.time_fn());

  TokenService tokens(tw->clock.time_fn());
  auto add_user = [&](const std::string& name) {
    const UserDef* def = tw->vo.user(name);
    Principal p{name, def->groups, def->roles, tokens.issue(name)};
    tw->principals[name] = p;
    shadow::User su;
    su.name = name;
    su.groups.insert(def->groups.begin(), def->groups.end());
    su.admin = p.is_admin();
    tw->shadow_users[name] = su;
    tw->user_names.push_back(name);
  };
  add_user("root");
  add_user("alice");
  add_user("bob");
  add_user("prodmgr");

  Rng rng(seed);
  Builder builder{*tw, rng};

  Principal& root = tw->as("root");
  Principal& alice = tw->as("alice");

  // world-writable top-level dirs
  for (const std::string& top : {"/alice", "/data", "/scratch"}) {
    tw->cat->mkdir(top, root);
    tw->cat->chmod(top, Perms::parse("rwxrwxrwx"), root);
    tw->sh.add_dir(top, "root", "admingrp", "rwxrwxrwx");
    builder.dirs.push_back(top);
    ++tw->entry_count;
  }

  // canonical fixture: /alice/sim/<period>/<version>/<files> with MonteCarlo rows
  builder.try_mkdir("/alice/sim", alice);
  for (const std::string& period : {"2001-11", "2001-12", "2002-03"}) {
    std::string pdir = "/alice/sim/" + period;
    tw->cat->mkdir(pdir, alice);
    tw->sh.add_dir(pdir, "alice", "alice", "rwxr-xr-x");
    builder.dirs.push_back(pdir);
    ++tw->entry_count;
    for (const std::string& version : {"V3.05", "V3.05.2", "V3.06"}) {
      std::string vdir = pdir + "/" + version;
      tw->cat->mkdir(vdir, alice);
      tw->sh.add_dir(vdir, "alice", "alice", "rwxr-xr-x");
      builder.dirs.push_back(vdir);
      ++tw->entry_count;
      TagSchema schema;
      schema.attrs = {{"npart", TagAttrType::Int}, {"energy", TagAttrType::Float}};
      tw->cat->define_tag(vdir, "MonteCarlo", schema, alice);
      tw->sh.define_tag(vdir, "MonteCarlo",
                        {{"npart", TagAttrType::Int}, {"energy", TagAttrType::Float}});
      for (int i = 0; i < 4; ++i) {
        std::string file = vdir + "/pbpb." + std::to_string(i) + ".root";
        tw->cat->register_file(file, PhysicalLocation{"SE_CERN", "sim", file}, 2'000'000'000,
                               alice);
        tw->sh.add_file(file, "alice", "alice", "rw-r--r--");
        builder.files.push_back(file);
        ++tw->entry_count;
        std::int64_t npart = 60 + 25 * i;  // straddles the classic npart>100 cut
        double energy = 5.5;
        tw->cat->set_tag_values(file, "MonteCarlo",
                                {{"npart", TagValue(npart)}, {"energy", TagValue(energy)}},
                                alice);
        tw->sh.set_tag_row(file, "MonteCarlo", {TagValue(npart), TagValue(energy)});
      }
    }
  }

  std::size_t attempts = 0;
  while (tw->entry_count < target_entries && attempts < target_entries * 20) {
    ++attempts;
    double roll = rng.real();
    Principal& user = builder.random_user();
    if (roll < 0.18) {
      std::string parent = rng.pick(builder.dirs);
      if (vogrid::split(parent.substr(1), '/').size() >= 4) continue;  // cap the depth
      builder.try_mkdir(join_path(parent, builder.fresh_dir_name()), user);
    } else if (roll < 0.75) {
      std::string parent = rng.pick(builder.dirs);
      builder.try_register(join_path(parent, builder.fresh_file_name()), user);
    } else if (roll < 0.80 && !builder.files.empty()) {
      std::string target = rng.pick(builder.files);
      std::string link = join_path(rng.pick(builder.dirs), "ln" + std::to_string(builder.name_counter++));
      try {
        tw->cat->symlink(link, target, user);
        tw->sh.add_file(link, user.user, user.primary_group(), "rwxrwxrwx");
        ++tw->entry_count;
      } catch (const GridError&) {
      }
    } else if (roll < 0.86) {
      builder.try_define_tag(rng.pick(builder.dirs), user);
    } else if (!builder.files.empty()) {
      builder.try_set_tag(rng.pick(builder.files), user);
    }
  }
  return tw;
}

std::string random_query(TwinCatalogue& tw, Rng& rng) {
  std::vector<std::string> paths;
  paths.reserve(tw.sh.entries().size());
  for (const auto& [path, e] : tw.sh.entries())
    if (path != "/") paths.push_back(path);

  std::string pattern;
  if (paths.empty() || rng.chance(0.08)) {
    int depth = 1 + static_cast<int>(rng.below(4));
    for (int i = 0; i < depth; ++i) pattern += rng.chance(0.5) ? "/*" : "/%";
  } else {
    const std::string& base = rng.pick(paths);
    auto segs = vogrid::split(base.substr(1), '/');
    for (auto& seg : segs) {
      double roll = rng.real();
      if (roll < 0.30) {
        // keep exact
      } else if (roll < 0.55) {
        seg = rng.chance(0.5) ? "*" : "%";
      } else if (roll < 0.75) {
        std::size_t keep = rng.below(seg.size()) + 1;
        seg = seg.substr(0, keep) + (rng.chance(0.5) ? "*" : "%");
      } else if (roll < 0.90) {
        std::size_t keep = rng.below(seg.size()) + 1;
        seg = "*" + seg.substr(seg.size() - keep);
      } else {
        seg = seg.substr(0, 1 + rng.below(seg.size())) + "*" +
              (rng.chance(0.5) ? ".root" : "");
      }
      pattern += "/" + seg;
    }
  }

  std::string query = "lfn://" + pattern;
  if (rng.chance(0.5)) {
    bool mc = rng.chance(0.6);
    query += mc ? "?MonteCarlo" : "?Quality";
    if (rng.chance(0.85)) {
      query += ":";
      int terms = 1 + static_cast<int>(rng.below(3));
      for (int t = 0; t < terms; ++t) {
        if (t) query += rng.chance(0.5) ? " and " : " or ";
        static const std::vector<std::string> ops = {">", "<", ">=", "<=", "=", "!="};
        const std::string& op = rng.pick(ops);
        double roll = rng.real();
        if (mc) {
          if (roll < 0.6)
            query += "npart" + op + std::to_string(rng.below(200));
          else if (roll < 0.9)
            query += "energy" + op + vogrid::format_real(static_cast<double>(rng.below(100)) / 2.0);
          else
            query += "npart" + op + "\"oops\"";  // type mismatch never matches
        } else {
          if (roll < 0.5) {
            static const std::vector<std::string> grades = {"good", "bad", "ugly", "other"};
            query += "grade" + op + "\"" + rng.pick(grades) + "\"";
          } else if (roll < 0.9) {
            query += "run" + op + std::to_string(1 + rng.below(20));
          } else {
            query += "bogus" + op + "1";  // unknown attribute never matches
          }
        }
      }
    }
  }
  return query;
}

}  // namespace catgen
