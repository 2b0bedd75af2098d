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

#include "vogrid/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "vogrid/errors.hpp"
#include "vogrid/util.hpp"

namespace vogrid {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(Errc::ParseError, "line " + std::to_string(line) + ": " + msg);
}

bool needs_quoting(const std::string& v) {
  if (v.empty()) return true;
  for (char c : v) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '#' || c == '=') return true;
  }
  return false;
}

std::string quote(const std::string& v) {
  if (!needs_quoting(v)) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Tokenizes one entry line into bare words and key=value pairs.
struct LineLexer {
  const std::string& s;
  std::size_t i = 0;
  int line;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool at_end() {
    skip_ws();
    return i >= s.size() || s[i] == '#';
  }

  std::string token() {
    skip_ws();
    std::string out;
    if (i < s.size() && s[i] == '"') return quoted();
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '=' && s[i] != '#')
      out += s[i++];
    return out;
  }

  std::string value() {
    if (i < s.size() && s[i] == '"') return quoted();
    std::string out;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '#') out += s[i++];
    return out;
  }

  std::string quoted() {
    ++i;  // opening quote
    std::string out;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out += s[i++];
    }
    if (i >= s.size()) parse_fail(line, "unterminated quoted string");
    ++i;  // closing quote
    return out;
  }
};

}  // namespace

bool ConfigEntry::has(const std::string& key) const {
  for (const auto& [k, v] : kv)
    if (k == key) return true;
  return false;
}

std::string ConfigEntry::get(const std::string& key) const {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  parse_fail(line, "entry '" + name + "' is missing required key '" + key + "'");
}

std::string ConfigEntry::get_or(const std::string& key, const std::string& dflt) const {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  return dflt;
}

std::vector<std::string> ConfigEntry::get_list(const std::string& key) const {
  std::string v = get_or(key, "");
  if (v.empty()) return {};
  return split(v, ',');
}

std::int64_t ConfigEntry::get_int(const std::string& key) const {
  auto v = parse_int(get(key));
  if (!v) parse_fail(line, "key '" + key + "' is not an integer");
  return *v;
}

std::int64_t ConfigEntry::get_int_or(const std::string& key, std::int64_t dflt) const {
  if (!has(key)) return dflt;
  return get_int(key);
}

std::uint64_t ConfigEntry::get_uint(const std::string& key) const {
  auto v = parse_uint(get(key));
  if (!v) parse_fail(line, "key '" + key + "' is not an unsigned integer");
  return *v;
}

double ConfigEntry::get_real_or(const std::string& key, double dflt) const {
  if (!has(key)) return dflt;
  auto v = parse_real(get(key));
  if (!v) parse_fail(line, "key '" + key + "' is not a number");
  return *v;
}

bool ConfigEntry::get_bool_or(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  std::string v = to_lower(get(key));
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  parse_fail(line, "key '" + key + "' is not a boolean");
}

void ConfigEntry::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : kv) {
    if (k == key) {
      v = value;
      return;
    }
  }
  kv.emplace_back(key, value);
}

const ConfigEntry* ConfigSection::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

ConfigDoc ConfigDoc::parse(const std::string& text) {
  ConfigDoc doc;
  ConfigSection* current = nullptr;
  int lineno = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) parse_fail(lineno, "missing ']' in section header");
      std::string inner = trim(line.substr(1, close - 1));
      if (inner.empty()) parse_fail(lineno, "empty section header");
      auto words = split(inner, ' ');
      ConfigSection sec;
      sec.kind = words[0];
      if (words.size() > 1) sec.arg = words[1];
      if (words.size() > 2) parse_fail(lineno, "too many tokens in section header");
      sec.line = lineno;
      doc.sections.push_back(std::move(sec));
      current = &doc.sections.back();
      continue;
    }
    if (!current) parse_fail(lineno, "entry before any [section] header");
    LineLexer lex{raw, 0, lineno};
    ConfigEntry entry;
    entry.line = lineno;
    entry.name = lex.token();
    if (entry.name.empty()) parse_fail(lineno, "entry has no name");
    while (!lex.at_end()) {
      std::string key = lex.token();
      if (key.empty()) break;
      lex.skip_ws();
      if (lex.i < raw.size() && raw[lex.i] == '=') {
        ++lex.i;
        lex.skip_ws();
        entry.kv.emplace_back(key, lex.value());
      } else {
        // bare flag token, treated as key=true
        entry.kv.emplace_back(key, "true");
      }
    }
    current->entries.push_back(std::move(entry));
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
  return parse(read_file(path));
}

std::string ConfigDoc::print() const {
  std::string out;
  for (const auto& sec : sections) {
    out += "[" + sec.kind;
    if (!sec.arg.empty()) out += " " + sec.arg;
    out += "]\n";
    for (const auto& e : sec.entries) {
      out += quote(e.name);
      for (const auto& [k, v] : e.kv) out += " " + k + "=" + quote(v);
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

const ConfigSection* ConfigDoc::find(const std::string& kind, const std::string& arg) const {
  for (const auto& s : sections)
    if (s.kind == kind && s.arg == arg) return &s;
  return nullptr;
}

std::vector<const ConfigSection*> ConfigDoc::all(const std::string& kind) const {
  std::vector<const ConfigSection*> out;
  for (const auto& s : sections)
    if (s.kind == kind) out.push_back(&s);
  return out;
}

ConfigSection& ConfigDoc::add(const std::string& kind, const std::string& arg) {
  ConfigSection s;
  s.kind = kind;
  s.arg = arg;
  sections.push_back(std::move(s));
  return sections.back();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::NotFound, "cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::NotFound, "cannot write file '" + path + "'");
  out << content;
}

}  // namespace vogrid
