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

#include "vogrid/catalogue.hpp"

#include <algorithm>
#include <cctype>

#include "vogrid/util.hpp"

namespace vogrid {

namespace {

constexpr int kMaxSymlinkDepth = 16;

const char* kind_name(EntryKind k) {
  switch (k) {
    case EntryKind::File: return "file";
    case EntryKind::Directory: return "directory";
    case EntryKind::Symlink: return "symlink";
    case EntryKind::Proc: return "proc";
  }
  return "?";
}

EntryKind kind_from_name(const std::string& s) {
  if (s == "file") return EntryKind::File;
  if (s == "directory") return EntryKind::Directory;
  if (s == "symlink") return EntryKind::Symlink;
  if (s == "proc") return EntryKind::Proc;
  fail(Errc::ParseError, "bad entry kind '" + s + "'");
}

void check_name(const std::string& name) {
  if (name.empty() || name == "." || name == ".." || name.find('/') != std::string::npos)
    fail(Errc::InvalidArgument, "invalid entry name '" + name + "'");
}

}  // namespace

std::string FileId::str() const {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Perms Perms::parse(const std::string& text) {
  Perms p;
  if (text.size() == 3) {
    for (char c : text) {
      if (c < '0' || c > '7') fail(Errc::ParseError, "bad permission string '" + text + "'");
      p.bits = (p.bits << 3) | static_cast<unsigned>(c - '0');
    }
    return p;
  }
  if (text.size() != 9) fail(Errc::ParseError, "bad permission string '" + text + "'");
  static const char symbols[3] = {'r', 'w', 'x'};
  for (int i = 0; i < 9; ++i) {
    char c = text[i];
    if (c == symbols[i % 3])
      p.bits |= 1u << (8 - i);
    else if (c != '-')
      fail(Errc::ParseError, "bad permission string '" + text + "'");
  }
  return p;
}

std::string Perms::str() const {
  std::string out(9, '-');
  static const char symbols[3] = {'r', 'w', 'x'};
  for (int i = 0; i < 9; ++i)
    if (bits & (1u << (8 - i))) out[i] = symbols[i % 3];
  return out;
}

std::string parent_path(const std::string& path) {
  auto pos = path.find_last_of('/');
  if (pos == std::string::npos || path == "/") return "/";
  if (pos == 0) return "/";
  return path.substr(0, pos);
}

std::string base_name(const std::string& path) {
  auto pos = path.find_last_of('/');
  if (pos == std::string::npos) return path;
  return path.substr(pos + 1);
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir == "/") return "/" + name;
  return dir + "/" + name;
}

// ---------------------------------------------------------------------------
// Query language
// ---------------------------------------------------------------------------

bool segment_match(const std::string& pattern, const std::string& segment) {
  std::size_t p = 0, i = 0;
  std::size_t star = std::string::npos, mark = 0;
  auto is_wild = [&](std::size_t k) { return pattern[k] == '*' || pattern[k] == '%'; };
  while (i < segment.size()) {
    if (p < pattern.size() && is_wild(p)) {
      star = p++;
      mark = i;
    } else if (p < pattern.size() && pattern[p] == segment[i]) {
      ++p;
      ++i;
    } else if (star != std::string::npos) {
      p = star + 1;
      i = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && is_wild(p)) ++p;
  return p == pattern.size();
}

namespace {

struct PredLexer {
  std::string_view s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool done() {
    skip_ws();
    return i >= s.size();
  }

  std::string ident() {
    skip_ws();
    std::string out;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      out += s[i++];
    return out;
  }

  TagComparison::Op op() {
    skip_ws();
    auto two = [&](char a, char b) {
      return i + 1 < s.size() && s[i] == a && s[i + 1] == b;
    };
    if (two('>', '=')) { i += 2; return TagComparison::Op::Ge; }
    if (two('<', '=')) { i += 2; return TagComparison::Op::Le; }
    if (two('!', '=')) { i += 2; return TagComparison::Op::Ne; }
    if (two('=', '=')) { i += 2; return TagComparison::Op::Eq; }
    if (i < s.size()) {
      if (s[i] == '>') { ++i; return TagComparison::Op::Gt; }
      if (s[i] == '<') { ++i; return TagComparison::Op::Lt; }
      if (s[i] == '=') { ++i; return TagComparison::Op::Eq; }
    }
    fail(Errc::ParseError, "expected comparison operator in predicate");
  }

  TagValue literal() {
    skip_ws();
    if (i >= s.size()) fail(Errc::ParseError, "missing literal in predicate");
    if (s[i] == '"') {
      ++i;
      std::string out;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        out += s[i++];
      }
      if (i >= s.size()) fail(Errc::ParseError, "unterminated string in predicate");
      ++i;
      return TagValue(out);
    }
    std::string tok;
    if (s[i] == '-' || s[i] == '+') tok += s[i++];
    bool real = false;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
      if (s[i] == '.') real = true;
      tok += s[i++];
    }
    if (tok.empty() || tok == "-" || tok == "+") {
      // bare word literal, treated as string
      std::string word;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) word += s[i++];
      if (word.empty()) fail(Errc::ParseError, "missing literal in predicate");
      return TagValue(word);
    }
    if (real) {
      auto v = parse_real(tok);
      if (!v) fail(Errc::ParseError, "bad number '" + tok + "' in predicate");
      return TagValue(*v);
    }
    auto v = parse_int(tok);
    if (!v) fail(Errc::ParseError, "bad number '" + tok + "' in predicate");
    return TagValue(*v);
  }
};

TagPredicate parse_predicate(const std::string& text) {
  TagPredicate pred;
  PredLexer lex{text};
  for (;;) {
    TagComparison cmp;
    cmp.attr = lex.ident();
    if (cmp.attr.empty()) fail(Errc::ParseError, "expected attribute name in predicate");
    cmp.op = lex.op();
    cmp.literal = lex.literal();
    pred.terms.push_back(std::move(cmp));
    if (lex.done()) break;
    std::size_t save = lex.i;
    std::string conn = lex.ident();
    if (conn.empty()) {
      lex.skip_ws();
      if (lex.i + 1 < lex.s.size() && lex.s[lex.i] == '&' && lex.s[lex.i + 1] == '&') {
        lex.i += 2;
        conn = "and";
      } else if (lex.i + 1 < lex.s.size() && lex.s[lex.i] == '|' && lex.s[lex.i + 1] == '|') {
        lex.i += 2;
        conn = "or";
      }
    }
    if (iequals(conn, "and")) pred.connective_is_and.push_back(true);
    else if (iequals(conn, "or")) pred.connective_is_and.push_back(false);
    else {
      lex.i = save;
      fail(Errc::ParseError, "expected and/or in predicate near '" + std::string(lex.s.substr(save)) + "'");
    }
  }
  return pred;
}

bool compare_tag(const TagComparison& cmp, const TagValue& actual) {
  int rel;  // -1, 0, 1
  if (std::holds_alternative<std::string>(actual)) {
    if (!std::holds_alternative<std::string>(cmp.literal)) return false;
    const auto& a = std::get<std::string>(actual);
    const auto& b = std::get<std::string>(cmp.literal);
    rel = a < b ? -1 : a > b ? 1 : 0;
  } else {
    if (std::holds_alternative<std::string>(cmp.literal)) return false;
    double a = std::holds_alternative<std::int64_t>(actual)
                   ? static_cast<double>(std::get<std::int64_t>(actual))
                   : std::get<double>(actual);
    double b = std::holds_alternative<std::int64_t>(cmp.literal)
                   ? static_cast<double>(std::get<std::int64_t>(cmp.literal))
                   : std::get<double>(cmp.literal);
    rel = a < b ? -1 : a > b ? 1 : 0;
  }
  switch (cmp.op) {
    case TagComparison::Op::Eq: return rel == 0;
    case TagComparison::Op::Ne: return rel != 0;
    case TagComparison::Op::Lt: return rel < 0;
    case TagComparison::Op::Le: return rel <= 0;
    case TagComparison::Op::Gt: return rel > 0;
    case TagComparison::Op::Ge: return rel >= 0;
  }
  return false;
}

std::string op_str(TagComparison::Op op) {
  switch (op) {
    case TagComparison::Op::Eq: return "=";
    case TagComparison::Op::Ne: return "!=";
    case TagComparison::Op::Lt: return "<";
    case TagComparison::Op::Le: return "<=";
    case TagComparison::Op::Gt: return ">";
    case TagComparison::Op::Ge: return ">=";
  }
  return "?";
}

std::string tag_value_str(const TagValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) return format_real(std::get<double>(v));
  return "\"" + std::get<std::string>(v) + "\"";
}

}  // namespace

bool TagPredicate::eval(const TagSchema& schema, const std::vector<TagValue>& row) const {
  auto term_value = [&](const TagComparison& cmp) -> bool {
    for (std::size_t k = 0; k < schema.attrs.size(); ++k) {
      if (schema.attrs[k].first == cmp.attr) return compare_tag(cmp, row[k]);
    }
    return false;  // unknown attribute never satisfies
  };
  // left-to-right, comparison binds tighter than the connectives
  bool acc = term_value(terms[0]);
  for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
    bool next = term_value(terms[k + 1]);
    acc = connective_is_and[k] ? (acc && next) : (acc || next);
  }
  return acc;
}

LfnQuery LfnQuery::parse(const std::string& text) {
  const std::string prefix = "lfn://";
  if (text.rfind(prefix, 0) != 0)
    fail(Errc::ParseError, "query must start with lfn:// — got '" + text + "'");
  std::string rest = text.substr(prefix.size());
  LfnQuery q;
  auto slash = rest.find('/');
  if (slash == std::string::npos) fail(Errc::ParseError, "query has no path pattern");
  q.host = rest.substr(0, slash);
  rest = rest.substr(slash);

  auto qmark = rest.find('?');
  q.pattern = qmark == std::string::npos ? rest : rest.substr(0, qmark);
  if (q.pattern.size() > 1 && q.pattern.back() == '/') q.pattern.pop_back();
  if (q.pattern.empty() || q.pattern[0] != '/')
    fail(Errc::ParseError, "pattern must be absolute");
  if (q.pattern != "/")
    for (const auto& s : split(q.pattern.substr(1), '/', true))
      if (s.empty()) fail(Errc::ParseError, "empty path segment in pattern");

  if (qmark != std::string::npos) {
    std::string tagpred = rest.substr(qmark + 1);
    auto colon = tagpred.find(':');
    std::string tag = colon == std::string::npos ? tagpred : tagpred.substr(0, colon);
    tag = trim(tag);
    if (tag.empty()) fail(Errc::ParseError, "empty tag name in query");
    q.tag = tag;
    if (colon != std::string::npos) {
      std::string predtext = trim(tagpred.substr(colon + 1));
      if (!predtext.empty()) q.predicate = parse_predicate(predtext);
    }
  }
  return q;
}

std::string LfnQuery::str() const {
  std::string out = "lfn://" + host + pattern;
  if (tag) {
    out += "?" + *tag;
    if (predicate) {
      out += ":";
      for (std::size_t k = 0; k < predicate->terms.size(); ++k) {
        if (k) out += predicate->connective_is_and[k - 1] ? " and " : " or ";
        const auto& t = predicate->terms[k];
        out += t.attr + op_str(t.op) + tag_value_str(t.literal);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalogue
// ---------------------------------------------------------------------------

Catalogue::Catalogue(const VoConfig* vo, TimeFn now, Journal* journal)
    : vo_(vo), now_(std::move(now)), journal_(journal) {
  root_.id = fresh_id();
  root_.name = "";
  root_.kind = EntryKind::Directory;
  root_.owner = "root";
  root_.group = "root";
  root_.perms = Perms::parse("rwxr-xr-x");
  dirs_[root_.id] = DirTable{root_.id, "s0", {}, {}};
}

FileId Catalogue::fresh_id() { return FileId{0, next_id_++}; }

std::vector<std::string> Catalogue::components(const std::string& path) {
  if (path.empty() || path[0] != '/') fail(Errc::NotFound, "path '" + path + "' is not absolute");
  if (path == "/") return {};
  auto parts = split(path.substr(1), '/', true);
  for (const auto& p : parts)
    if (p.empty() || p == "." || p == "..")
      fail(Errc::NotFound, "path '" + path + "' is not canonical");
  return parts;
}

int Catalogue::relation(const CatalogueEntry& e, const Principal& p) const {
  if (e.owner == p.user) return 0;
  if (p.in_group(e.group)) return 1;
  return 2;
}

bool Catalogue::allowed(const CatalogueEntry& e, const Principal& p, char mode) const {
  if (p.is_admin()) return true;
  return e.perms.allows(relation(e, p), mode);
}

void Catalogue::require(const CatalogueEntry& e, const Principal& p, char mode,
                        const std::string& what) const {
  if (!allowed(e, p, mode))
    fail(Errc::PermissionDenied,
         std::string(1, mode) + " denied for '" + p.user + "' on " + what);
}

const Catalogue::Resolved Catalogue::resolve(const std::string& path, const Principal& p,
                                             bool checked, bool follow_final, int depth) const {
  if (depth > kMaxSymlinkDepth) fail(Errc::SymlinkLoop, "symlink depth exceeded at '" + path + "'");
  auto parts = components(path);
  auto* self = const_cast<Catalogue*>(this);
  if (parts.empty()) return Resolved{nullptr, &self->root_, "/"};

  CatalogueEntry* cur = &self->root_;
  std::string cur_path = "/";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!is_dir_kind(cur->kind)) fail(Errc::NotFound, "'" + cur_path + "' is not a directory");
    if (checked) {
      require(*cur, p, 'r', "'" + cur_path + "'");
      require(*cur, p, 'x', "'" + cur_path + "'");
    }
    DirTable& table = self->table_of(cur->id);
    auto it = table.entries.find(parts[i]);
    if (it == table.entries.end())
      fail(Errc::NotFound, "no entry '" + join_path(cur_path, parts[i]) + "'");
    CatalogueEntry* child = &it->second;
    bool last = i + 1 == parts.size();
    if (child->kind == EntryKind::Symlink && (!last || follow_final)) {
      // splice the link target in front of the remaining components
      std::string rebuilt = child->link_target;
      for (std::size_t k = i + 1; k < parts.size(); ++k) rebuilt = join_path(rebuilt, parts[k]);
      return resolve(rebuilt, p, checked, follow_final, depth + 1);
    }
    if (last) return Resolved{&table, child, join_path(cur_path, parts[i])};
    cur = child;
    cur_path = join_path(cur_path, parts[i]);
  }
  fail(Errc::NotFound, "unreachable");
}

Catalogue::DirTable& Catalogue::table_of(FileId id) {
  auto it = dirs_.find(id);
  if (it == dirs_.end()) fail(Errc::NotFound, "dangling directory id " + id.str());
  return it->second;
}

const Catalogue::DirTable& Catalogue::table_of(FileId id) const {
  return const_cast<Catalogue*>(this)->table_of(id);
}

void Catalogue::record(const nlohmann::json& j) {
  if (journal_) journal_->append(j);
}

namespace {

void check_token(const Principal& p, const TimeFn& now) {
  if (p.user.empty()) fail(Errc::PermissionDenied, "anonymous principal");
  if (p.token.subject != p.user || p.token.expired(now ? now() : 0))
    fail(Errc::AuthExpired, "token for '" + p.user + "' expired; re-authenticate");
}

nlohmann::json id_json(FileId id) { return nlohmann::json::array({id.hi, id.lo}); }

FileId id_from(const nlohmann::json& j) { return FileId{j.at(0), j.at(1)}; }

}  // namespace

CatalogueEntry Catalogue::mkdir(const std::string& path, const Principal& p,
                                const std::string& shard_hint) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  std::string parent = parent_path(path);
  std::string name = base_name(path);
  if (path == "/") fail(Errc::AlreadyExists, "'/' already exists");
  check_name(name);
  Resolved dir = resolve(parent, p, true, true);
  if (!is_dir_kind(dir.entry->kind)) fail(Errc::NotFound, "'" + parent + "' is not a directory");
  require(*dir.entry, p, 'w', "'" + parent + "'");
  DirTable& table = table_of(dir.entry->id);
  if (table.entries.count(name)) fail(Errc::AlreadyExists, "'" + path + "' already exists");

  CatalogueEntry e;
  e.id = fresh_id();
  e.name = name;
  e.kind = EntryKind::Directory;
  e.owner = p.user;
  e.group = p.primary_group();
  e.perms = Perms::parse("rwxr-xr-x");
  std::string shard = shard_hint.empty() ? table.shard : shard_hint;
  table.entries[name] = e;
  dirs_[e.id] = DirTable{e.id, shard, {}, {}};

  record({{"op", "mkdir"},
          {"path", join_path(dir.path, name)},
          {"id", id_json(e.id)},
          {"owner", e.owner},
          {"group", e.group},
          {"perms", e.perms.str()},
          {"shard", shard}});
  return e;
}

FileId Catalogue::register_file(const std::string& lfn, const PhysicalLocation& loc,
                                std::uint64_t size, const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  if (!vo_ || !vo_->has_se(loc.se)) fail(Errc::UnknownSE, "storage element '" + loc.se + "'");
  std::string parent = parent_path(lfn);
  std::string name = base_name(lfn);
  check_name(name);
  Resolved dir = resolve(parent, p, true, true);
  if (!is_dir_kind(dir.entry->kind)) fail(Errc::NotFound, "'" + parent + "' is not a directory");
  require(*dir.entry, p, 'w', "'" + parent + "'");
  DirTable& table = table_of(dir.entry->id);
  if (table.entries.count(name)) fail(Errc::AlreadyExists, "'" + lfn + "' already exists");

  CatalogueEntry e;
  e.id = fresh_id();
  e.name = name;
  e.kind = EntryKind::File;
  e.owner = p.user;
  e.group = p.primary_group();
  e.perms = Perms::parse("rw-r--r--");
  e.size = size;
  e.replicas.push_back(loc);
  table.entries[name] = e;
  ++replica_version_;

  record({{"op", "register"},
          {"path", join_path(dir.path, name)},
          {"id", id_json(e.id)},
          {"owner", e.owner},
          {"group", e.group},
          {"perms", e.perms.str()},
          {"size", size},
          {"se", loc.se},
          {"protocol", loc.protocol},
          {"pfn", loc.path}});
  return e.id;
}

CatalogueEntry Catalogue::add_replica(const std::string& lfn, const PhysicalLocation& loc,
                                      const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  if (!vo_ || !vo_->has_se(loc.se)) fail(Errc::UnknownSE, "storage element '" + loc.se + "'");
  Resolved r = resolve(lfn, p, true, true);
  if (r.entry->kind != EntryKind::File) fail(Errc::NotFound, "'" + lfn + "' is not a file");
  require(*r.entry, p, 'w', "'" + lfn + "'");
  for (const auto& existing : r.entry->replicas)
    if (existing.se == loc.se && existing.path == loc.path)
      fail(Errc::Duplicate, "replica (" + loc.se + ", " + loc.path + ") already registered");
  r.entry->replicas.push_back(loc);
  ++replica_version_;

  record({{"op", "add_replica"},
          {"path", r.path},
          {"se", loc.se},
          {"protocol", loc.protocol},
          {"pfn", loc.path}});
  return *r.entry;
}

CatalogueEntry Catalogue::lookup(const std::string& lfn, const Principal& p) const {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(lfn, p, true, true);
  return *r.entry;
}

void Catalogue::rename(const std::string& src, const std::string& dst, const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved s = resolve(src, p, true, false);
  if (!s.parent) fail(Errc::PermissionDenied, "cannot rename '/'");
  std::string dst_parent = parent_path(dst);
  std::string dst_name = base_name(dst);
  Resolved d = resolve(dst_parent, p, true, true);
  if (!is_dir_kind(d.entry->kind)) fail(Errc::NotFound, "'" + dst_parent + "' is not a directory");
  require(*d.entry, p, 'w', "'" + dst_parent + "'");
  DirTable& dst_table = table_of(d.entry->id);
  std::string dst_full = join_path(d.path, dst_name);
  if (dst_table.entries.count(dst_name)) fail(Errc::AlreadyExists, "'" + dst_full + "' already exists");
  if (is_dir_kind(s.entry->kind) &&
      (dst_full == s.path || dst_full.rfind(s.path + "/", 0) == 0))
    fail(Errc::InvalidArgument, "cannot move '" + s.path + "' inside itself");

  DirTable& src_table = *s.parent;
  std::string old_name = s.entry->name;
  CatalogueEntry moved = *s.entry;
  moved.name = dst_name;
  bool same_table = src_table.id == dst_table.id;

  src_table.entries.erase(old_name);
  dst_table.entries[dst_name] = moved;
  for (auto& [tag, table] : src_table.tags) {
    auto it = table.rows.find(old_name);
    if (it == table.rows.end()) continue;
    if (same_table) {
      auto row = it->second;
      table.rows.erase(it);
      table.rows[dst_name] = std::move(row);
    } else {
      // tags are directory-scoped tables; the row does not follow
      table.rows.erase(it);
    }
  }

  record({{"op", "rename"}, {"src", s.path}, {"dst", dst_full}});
}

std::string Catalogue::create_proc_dir(std::int64_t job_id, const std::string& owner) {
  std::lock_guard lock(mu_);
  if (job_exists_ && !job_exists_(job_id))
    fail(Errc::UnknownJob, "job " + std::to_string(job_id) + " is not in the task queue");
  std::string path = "/proc/" + std::to_string(job_id);
  auto proc_it = dirs_.find(root_.id);
  auto proc_entry = proc_it->second.entries.find("proc");
  if (proc_entry == proc_it->second.entries.end())
    fail(Errc::NotFound, "'/proc' missing; catalogue not bootstrapped");
  DirTable& proc_table = table_of(proc_entry->second.id);
  std::string name = std::to_string(job_id);
  if (proc_table.entries.count(name)) fail(Errc::AlreadyExists, "'" + path + "' already exists");

  CatalogueEntry e;
  e.id = fresh_id();
  e.name = name;
  e.kind = EntryKind::Proc;
  e.owner = owner;
  e.group = owner;
  e.perms = Perms::parse("rwx------");
  proc_table.entries[name] = e;
  dirs_[e.id] = DirTable{e.id, proc_table.shard, {}, {}};

  record({{"op", "proc"}, {"job", job_id}, {"owner", owner}, {"id", id_json(e.id)}});
  return path;
}

void Catalogue::symlink(const std::string& link, const std::string& target, const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  std::string parent = parent_path(link);
  std::string name = base_name(link);
  check_name(name);
  Resolved dir = resolve(parent, p, true, true);
  if (!is_dir_kind(dir.entry->kind)) fail(Errc::NotFound, "'" + parent + "' is not a directory");
  require(*dir.entry, p, 'w', "'" + parent + "'");
  DirTable& table = table_of(dir.entry->id);
  if (table.entries.count(name)) fail(Errc::AlreadyExists, "'" + link + "' already exists");
  if (target.empty() || target[0] != '/')
    fail(Errc::InvalidArgument, "symlink target must be absolute");

  CatalogueEntry e;
  e.id = fresh_id();
  e.name = name;
  e.kind = EntryKind::Symlink;
  e.owner = p.user;
  e.group = p.primary_group();
  e.perms = Perms::parse("rwxrwxrwx");
  e.link_target = target;
  table.entries[name] = e;

  record({{"op", "symlink"}, {"path", join_path(dir.path, name)}, {"target", target},
          {"id", id_json(e.id)}, {"owner", e.owner}, {"group", e.group}});
}

void Catalogue::remove(const std::string& lfn, const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(lfn, p, true, false);
  if (!r.parent) fail(Errc::PermissionDenied, "cannot remove '/'");
  // deletion right is write on the parent directory
  Resolved pr = resolve(parent_path(r.path), p, false, true);
  require(*pr.entry, p, 'w', "'" + parent_path(r.path) + "'");

  if (is_dir_kind(r.entry->kind)) {
    DirTable& table = table_of(r.entry->id);
    if (!table.entries.empty()) fail(Errc::NotEmpty, "'" + r.path + "' is not empty");
    dirs_.erase(r.entry->id);
  } else if (r.entry->kind == EntryKind::File) {
    if (!r.entry->replicas.empty() && !p.is_admin())
      fail(Errc::PermissionDenied, "'" + r.path + "' still has replicas; admin role required");
    ++replica_version_;
  }
  std::string name = r.entry->name;
  for (auto& [tag, table] : r.parent->tags) table.rows.erase(name);
  r.parent->entries.erase(name);

  record({{"op", "remove"}, {"path", r.path}});
}

void Catalogue::chmod(const std::string& lfn, Perms perms, const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(lfn, p, true, false);
  if (r.entry->owner != p.user && !p.is_admin())
    fail(Errc::PermissionDenied, "only the owner or an admin may chmod '" + r.path + "'");
  r.entry->perms = perms;
  record({{"op", "chmod"}, {"path", r.path}, {"perms", perms.str()}});
}

std::vector<CatalogueEntry> Catalogue::list_dir(const std::string& path, const Principal& p) const {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(path, p, true, true);
  if (!is_dir_kind(r.entry->kind)) fail(Errc::NotFound, "'" + path + "' is not a directory");
  require(*r.entry, p, 'r', "'" + r.path + "'");
  require(*r.entry, p, 'x', "'" + r.path + "'");
  const DirTable& table = table_of(r.entry->id);
  std::vector<CatalogueEntry> out;
  out.reserve(table.entries.size());
  for (const auto& [name, e] : table.entries) out.push_back(e);
  return out;
}

void Catalogue::define_tag(const std::string& dir, const std::string& tag,
                           const TagSchema& schema, const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(dir, p, true, true);
  if (!is_dir_kind(r.entry->kind)) fail(Errc::NotFound, "'" + dir + "' is not a directory");
  require(*r.entry, p, 'w', "'" + r.path + "'");
  DirTable& table = table_of(r.entry->id);
  if (table.tags.count(tag)) fail(Errc::AlreadyExists, "tag '" + tag + "' already defined on '" + r.path + "'");
  if (schema.attrs.empty()) fail(Errc::BadSchema, "tag schema must have at least one attribute");
  std::vector<std::string> seen;
  for (const auto& [name, type] : schema.attrs) {
    if (name.empty()) fail(Errc::BadSchema, "empty attribute name");
    if (std::find(seen.begin(), seen.end(), name) != seen.end())
      fail(Errc::BadSchema, "duplicate attribute '" + name + "'");
    seen.push_back(name);
  }
  table.tags[tag] = TagTable{schema, {}};

  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& [name, type] : schema.attrs)
    attrs.push_back({{"name", name},
                     {"type", type == TagAttrType::Int ? "int"
                              : type == TagAttrType::Float ? "float" : "string"}});
  record({{"op", "define_tag"}, {"dir", r.path}, {"tag", tag}, {"schema", attrs}});
}

namespace {

nlohmann::json tag_value_json(const TagValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  return std::get<std::string>(v);
}

}  // namespace

void Catalogue::set_tag_values(const std::string& lfn, const std::string& tag,
                               const std::vector<std::pair<std::string, TagValue>>& values,
                               const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(lfn, p, true, false);
  if (!r.parent) fail(Errc::NoSuchTag, "the root has no owning directory");
  auto tag_it = r.parent->tags.find(tag);
  if (tag_it == r.parent->tags.end())
    fail(Errc::NoSuchTag, "tag '" + tag + "' not defined on '" + parent_path(r.path) + "'");
  require(*r.entry, p, 'w', "'" + r.path + "'");

  const TagSchema& schema = tag_it->second.schema;
  std::vector<TagValue> row(schema.attrs.size());
  std::vector<bool> filled(schema.attrs.size(), false);
  for (const auto& [name, value] : values) {
    bool found = false;
    for (std::size_t k = 0; k < schema.attrs.size(); ++k) {
      if (schema.attrs[k].first != name) continue;
      found = true;
      if (filled[k]) fail(Errc::TypeMismatch, "attribute '" + name + "' given twice");
      TagAttrType want = schema.attrs[k].second;
      bool ok = (want == TagAttrType::Int && std::holds_alternative<std::int64_t>(value)) ||
                (want == TagAttrType::Float && (std::holds_alternative<double>(value) ||
                                                std::holds_alternative<std::int64_t>(value))) ||
                (want == TagAttrType::String && std::holds_alternative<std::string>(value));
      if (!ok) fail(Errc::TypeMismatch, "attribute '" + name + "' has the wrong type");
      // ints widen to float attributes
      if (want == TagAttrType::Float && std::holds_alternative<std::int64_t>(value))
        row[k] = static_cast<double>(std::get<std::int64_t>(value));
      else
        row[k] = value;
      filled[k] = true;
    }
    if (!found) fail(Errc::TypeMismatch, "attribute '" + name + "' not in tag schema");
  }
  for (std::size_t k = 0; k < schema.attrs.size(); ++k)
    if (!filled[k]) fail(Errc::TypeMismatch, "attribute '" + schema.attrs[k].first + "' missing");

  tag_it->second.rows[r.entry->name] = row;

  nlohmann::json vals = nlohmann::json::array();
  for (const auto& v : row) vals.push_back(tag_value_json(v));
  record({{"op", "set_tag"}, {"path", r.path}, {"tag", tag}, {"values", vals}});
}

std::map<std::string, TagTable> Catalogue::tags_of(const std::string& dir, const Principal& p) const {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(dir, p, true, true);
  if (!is_dir_kind(r.entry->kind)) fail(Errc::NotFound, "'" + dir + "' is not a directory");
  require(*r.entry, p, 'r', "'" + r.path + "'");
  return table_of(r.entry->id).tags;
}

void Catalogue::find_rec(const DirTable& dir, const std::string& prefix,
                         const std::vector<std::string>& pattern, std::size_t depth,
                         const Principal& p, const LfnQuery& q,
                         std::vector<std::string>& out) const {
  const std::string& want = pattern[depth];
  bool leaf = depth + 1 == pattern.size();
  for (const auto& [name, entry] : dir.entries) {
    if (!segment_match(want, name)) continue;
    std::string path = join_path(prefix, name);
    if (leaf) {
      if (q.tag) {
        auto tag_it = dir.tags.find(*q.tag);
        if (tag_it == dir.tags.end()) continue;  // directories lacking the tag contribute nothing
        auto row_it = tag_it->second.rows.find(name);
        if (row_it == tag_it->second.rows.end()) continue;  // entries without a row are excluded
        if (q.predicate && !q.predicate->eval(tag_it->second.schema, row_it->second)) continue;
      }
      out.push_back(path);
    } else if (is_dir_kind(entry.kind)) {
      if (allowed(entry, p, 'r') && allowed(entry, p, 'x'))
        find_rec(table_of(entry.id), path, pattern, depth + 1, p, q, out);
    }
  }
}

std::vector<std::string> Catalogue::find(const LfnQuery& q, const Principal& p) const {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  std::vector<std::string> out;
  if (q.pattern == "/") {
    out.push_back("/");
    return out;
  }
  auto pattern = split(q.pattern.substr(1), '/', true);
  if (allowed(root_, p, 'r') && allowed(root_, p, 'x'))
    find_rec(table_of(root_.id), "/", pattern, 0, p, q, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Catalogue::find(const std::string& query_text, const Principal& p) const {
  return find(LfnQuery::parse(query_text), p);
}

bool Catalogue::check_access(const std::string& lfn, const Principal& p, char mode) const {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  Resolved r = resolve(lfn, p, false, true);
  return allowed(*r.entry, p, mode);
}

void Catalogue::move_subtree_to_shard(const std::string& dir, const std::string& shard,
                                      const Principal& p) {
  std::lock_guard lock(mu_);
  check_token(p, now_);
  if (!p.is_admin()) fail(Errc::PermissionDenied, "shard moves require the admin role");
  Resolved r = resolve(dir, p, false, true);
  if (!is_dir_kind(r.entry->kind)) fail(Errc::NotFound, "'" + dir + "' is not a directory");

  std::function<void(DirTable&)> rehome = [&](DirTable& t) {
    t.shard = shard;
    for (auto& [name, e] : t.entries)
      if (is_dir_kind(e.kind)) rehome(table_of(e.id));
  };
  rehome(table_of(r.entry->id));

  record({{"op", "move_shard"}, {"dir", r.path}, {"shard", shard}});
}

std::string Catalogue::shard_of(const std::string& dir) const {
  std::lock_guard lock(mu_);
  Principal admin{"root", {}, {"admin"}, {"root", 0, 1}};
  Resolved r = resolve(dir, admin, false, true);
  if (!is_dir_kind(r.entry->kind)) fail(Errc::NotFound, "'" + dir + "' is not a directory");
  return table_of(r.entry->id).shard;
}

std::vector<std::string> Catalogue::shards() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, t] : dirs_)
    if (std::find(out.begin(), out.end(), t.shard) == out.end()) out.push_back(t.shard);
  std::sort(out.begin(), out.end());
  return out;
}

bool Catalogue::exists(const std::string& lfn) const {
  std::lock_guard lock(mu_);
  Principal admin{"root", {}, {"admin"}, {"root", 0, 1}};
  try {
    resolve(lfn, admin, false, false);
    return true;
  } catch (const GridError&) {
    return false;
  }
}

void Catalogue::dump_rec(const DirTable& dir, const std::string& prefix,
                         std::vector<std::pair<std::string, CatalogueEntry>>& out) const {
  for (const auto& [name, e] : dir.entries) {
    std::string path = join_path(prefix, name);
    out.emplace_back(path, e);
    if (is_dir_kind(e.kind)) dump_rec(table_of(e.id), path, out);
  }
}

std::vector<std::pair<std::string, CatalogueEntry>> Catalogue::dump() const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<std::string, CatalogueEntry>> out;
  out.emplace_back("/", root_);
  dump_rec(table_of(root_.id), "/", out);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot / replay
// ---------------------------------------------------------------------------

namespace {

nlohmann::json entry_json(const CatalogueEntry& e) {
  nlohmann::json replicas = nlohmann::json::array();
  for (const auto& r : e.replicas) replicas.push_back({r.se, r.protocol, r.path});
  return {{"id", id_json(e.id)},     {"name", e.name},   {"kind", kind_name(e.kind)},
          {"owner", e.owner},        {"group", e.group}, {"perms", e.perms.str()},
          {"size", e.size},          {"replicas", replicas}, {"link", e.link_target}};
}

CatalogueEntry entry_from(const nlohmann::json& j) {
  CatalogueEntry e;
  e.id = id_from(j.at("id"));
  e.name = j.at("name");
  e.kind = kind_from_name(j.at("kind"));
  e.owner = j.at("owner");
  e.group = j.at("group");
  e.perms = Perms::parse(j.at("perms"));
  e.size = j.at("size");
  for (const auto& r : j.at("replicas"))
    e.replicas.push_back(PhysicalLocation{r.at(0), r.at(1), r.at(2)});
  e.link_target = j.at("link");
  return e;
}

TagValue tag_value_from(const nlohmann::json& j, TagAttrType want) {
  if (want == TagAttrType::Int) return TagValue(j.get<std::int64_t>());
  if (want == TagAttrType::Float) return TagValue(j.get<double>());
  return TagValue(j.get<std::string>());
}

TagAttrType attr_type_from(const std::string& s) {
  if (s == "int") return TagAttrType::Int;
  if (s == "float") return TagAttrType::Float;
  if (s == "string") return TagAttrType::String;
  fail(Errc::ParseError, "bad tag attribute type '" + s + "'");
}

}  // namespace

nlohmann::json Catalogue::snapshot() const {
  std::lock_guard lock(mu_);
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& [id, t] : dirs_) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [name, e] : t.entries) entries.push_back(entry_json(e));
    nlohmann::json tags = nlohmann::json::object();
    for (const auto& [tag, table] : t.tags) {
      nlohmann::json schema = nlohmann::json::array();
      for (const auto& [name, type] : table.schema.attrs)
        schema.push_back({{"name", name},
                          {"type", type == TagAttrType::Int ? "int"
                                   : type == TagAttrType::Float ? "float" : "string"}});
      nlohmann::json rows = nlohmann::json::object();
      for (const auto& [key, row] : table.rows) {
        nlohmann::json vals = nlohmann::json::array();
        for (const auto& v : row) vals.push_back(tag_value_json(v));
        rows[key] = vals;
      }
      tags[tag] = {{"schema", schema}, {"rows", rows}};
    }
    dirs.push_back({{"id", id_json(id)}, {"shard", t.shard}, {"entries", entries}, {"tags", tags}});
  }
  return {{"version", Journal::kVersion},
          {"kind", "catalogue"},
          {"next_id", next_id_},
          {"root", entry_json(root_)},
          {"dirs", dirs}};
}

void Catalogue::restore(const nlohmann::json& snap) {
  std::lock_guard lock(mu_);
  if (snap.at("version") != Journal::kVersion)
    fail(Errc::ParseError, "unsupported catalogue snapshot version");
  dirs_.clear();
  next_id_ = snap.at("next_id");
  root_ = entry_from(snap.at("root"));
  for (const auto& d : snap.at("dirs")) {
    DirTable t;
    t.id = id_from(d.at("id"));
    t.shard = d.at("shard");
    for (const auto& ej : d.at("entries")) {
      CatalogueEntry e = entry_from(ej);
      t.entries[e.name] = e;
    }
    for (const auto& [tag, tj] : d.at("tags").items()) {
      TagTable table;
      for (const auto& attr : tj.at("schema"))
        table.schema.attrs.emplace_back(attr.at("name"), attr_type_from(attr.at("type")));
      for (const auto& [key, vals] : tj.at("rows").items()) {
        std::vector<TagValue> row;
        for (std::size_t k = 0; k < vals.size(); ++k)
          row.push_back(tag_value_from(vals[k], table.schema.attrs[k].second));
        table.rows[key] = std::move(row);
      }
      t.tags[tag] = std::move(table);
    }
    dirs_[t.id] = std::move(t);
  }
}

void Catalogue::apply(const nlohmann::json& j) {
  std::string op = j.at("op");
  auto bump_id = [&](FileId id) { next_id_ = std::max(next_id_, id.lo + 1); };
  auto locate_table = [&](const std::string& dirpath) -> DirTable& {
    Principal admin{"root", {}, {"admin"}, {"root", 0, 1}};
    Resolved r = resolve(dirpath, admin, false, false);
    return table_of(r.entry->id);
  };

  if (op == "mkdir" || op == "proc") {
    std::string path = op == "proc" ? "/proc/" + std::to_string(j.at("job").get<std::int64_t>())
                                    : j.at("path").get<std::string>();
    DirTable& parent = locate_table(parent_path(path));
    CatalogueEntry e;
    e.id = id_from(j.at("id"));
    e.name = base_name(path);
    e.kind = op == "proc" ? EntryKind::Proc : EntryKind::Directory;
    e.owner = j.at("owner");
    e.group = op == "proc" ? j.at("owner").get<std::string>() : j.at("group").get<std::string>();
    e.perms = op == "proc" ? Perms::parse("rwx------") : Perms::parse(j.at("perms").get<std::string>());
    std::string shard = op == "proc" ? parent.shard : j.at("shard").get<std::string>();
    parent.entries[e.name] = e;
    dirs_[e.id] = DirTable{e.id, shard, {}, {}};
    bump_id(e.id);
  } else if (op == "register") {
    std::string path = j.at("path");
    DirTable& parent = locate_table(parent_path(path));
    CatalogueEntry e;
    e.id = id_from(j.at("id"));
    e.name = base_name(path);
    e.kind = EntryKind::File;
    e.owner = j.at("owner");
    e.group = j.at("group");
    e.perms = Perms::parse(j.at("perms").get<std::string>());
    e.size = j.at("size");
    e.replicas.push_back(PhysicalLocation{j.at("se"), j.at("protocol"), j.at("pfn")});
    parent.entries[e.name] = e;
    bump_id(e.id);
    ++replica_version_;
  } else if (op == "add_replica") {
    std::string path = j.at("path");
    DirTable& parent = locate_table(parent_path(path));
    parent.entries.at(base_name(path))
        .replicas.push_back(PhysicalLocation{j.at("se"), j.at("protocol"), j.at("pfn")});
    ++replica_version_;
  } else if (op == "rename") {
    std::string src = j.at("src"), dst = j.at("dst");
    DirTable& st = locate_table(parent_path(src));
    DirTable& dt = locate_table(parent_path(dst));
    std::string old_name = base_name(src), new_name = base_name(dst);
    CatalogueEntry moved = st.entries.at(old_name);
    moved.name = new_name;
    bool same = st.id == dt.id;
    st.entries.erase(old_name);
    dt.entries[new_name] = moved;
    for (auto& [tag, table] : st.tags) {
      auto it = table.rows.find(old_name);
      if (it == table.rows.end()) continue;
      if (same) {
        auto row = it->second;
        table.rows.erase(it);
        table.rows[new_name] = std::move(row);
      } else {
        table.rows.erase(it);
      }
    }
  } else if (op == "symlink") {
    std::string path = j.at("path");
    DirTable& parent = locate_table(parent_path(path));
    CatalogueEntry e;
    e.id = id_from(j.at("id"));
    e.name = base_name(path);
    e.kind = EntryKind::Symlink;
    e.owner = j.at("owner");
    e.group = j.at("group");
    e.perms = Perms::parse("rwxrwxrwx");
    e.link_target = j.at("target");
    parent.entries[e.name] = e;
    bump_id(e.id);
  } else if (op == "remove") {
    std::string path = j.at("path");
    DirTable& parent = locate_table(parent_path(path));
    std::string name = base_name(path);
    auto it = parent.entries.find(name);
    if (it != parent.entries.end()) {
      if (is_dir_kind(it->second.kind)) dirs_.erase(it->second.id);
      for (auto& [tag, table] : parent.tags) table.rows.erase(name);
      parent.entries.erase(it);
    }
  } else if (op == "define_tag") {
    DirTable& table = locate_table(j.at("dir"));
    TagTable t;
    for (const auto& attr : j.at("schema"))
      t.schema.attrs.emplace_back(attr.at("name"), attr_type_from(attr.at("type")));
    table.tags[j.at("tag").get<std::string>()] = std::move(t);
  } else if (op == "set_tag") {
    std::string path = j.at("path");
    DirTable& parent = locate_table(parent_path(path));
    TagTable& table = parent.tags.at(j.at("tag").get<std::string>());
    std::vector<TagValue> row;
    const auto& vals = j.at("values");
    for (std::size_t k = 0; k < vals.size(); ++k)
      row.push_back(tag_value_from(vals[k], table.schema.attrs[k].second));
    table.rows[base_name(path)] = std::move(row);
  } else if (op == "chmod") {
    std::string path = j.at("path");
    Perms perms = Perms::parse(j.at("perms").get<std::string>());
    if (path == "/") {
      root_.perms = perms;
    } else {
      DirTable& parent = locate_table(parent_path(path));
      parent.entries.at(base_name(path)).perms = perms;
    }
  } else if (op == "move_shard") {
    Principal admin{"root", {}, {"admin"}, {"root", 0, 1}};
    Resolved r = resolve(j.at("dir").get<std::string>(), admin, false, true);
    std::function<void(DirTable&)> rehome = [&](DirTable& t) {
      t.shard = j.at("shard").get<std::string>();
      for (auto& [name, e] : t.entries)
        if (is_dir_kind(e.kind)) rehome(table_of(e.id));
    };
    rehome(table_of(r.entry->id));
  } else {
    fail(Errc::ParseError, "unknown catalogue journal op '" + op + "'");
  }
}

void Catalogue::replay(const Journal& j) {
  std::lock_guard lock(mu_);
  if (j.snapshot()) {
    restore(*j.snapshot());
  } else {
    dirs_.clear();
    next_id_ = 1;
    root_ = CatalogueEntry{};
    root_.id = fresh_id();
    root_.kind = EntryKind::Directory;
    root_.owner = "root";
    root_.group = "root";
    root_.perms = Perms::parse("rwxr-xr-x");
    dirs_[root_.id] = DirTable{root_.id, "s0", {}, {}};
  }
  for (const auto& line : j.records()) apply(nlohmann::json::parse(line));
}

void Catalogue::checkpoint() {
  std::lock_guard lock(mu_);
  if (journal_) journal_->set_snapshot(snapshot());
}

}  // namespace vogrid
