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

#include "vogrid/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>

#include "vogrid/errors.hpp"
#include "vogrid/time.hpp"

namespace vogrid {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotFound: return "NotFound";
    case Errc::PermissionDenied: return "PermissionDenied";
    case Errc::AlreadyExists: return "AlreadyExists";
    case Errc::Duplicate: return "Duplicate";
    case Errc::UnknownSE: return "UnknownSE";
    case Errc::SymlinkLoop: return "SymlinkLoop";
    case Errc::UnknownJob: return "UnknownJob";
    case Errc::BadSchema: return "BadSchema";
    case Errc::NoSuchTag: return "NoSuchTag";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::AuthExpired: return "AuthExpired";
    case Errc::UnknownPackage: return "UnknownPackage";
    case Errc::UnknownCommand: return "UnknownCommand";
    case Errc::VersionConflict: return "VersionConflict";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::NotInstalled: return "NotInstalled";
    case Errc::IllegalTransition: return "IllegalTransition";
    case Errc::StaleReport: return "StaleReport";
    case Errc::Terminal: return "Terminal";
    case Errc::AlreadyReplicated: return "AlreadyReplicated";
    case Errc::InsufficientSpace: return "InsufficientSpace";
    case Errc::IntegrityError: return "IntegrityError";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NoResults: return "NoResults";
    case Errc::NameClash: return "NameClash";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::NotEmpty: return "NotEmpty";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ServiceDown: return "ServiceDown";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "UnknownError";
}

std::vector<std::string> split(std::string_view s, char sep, bool keep_empty) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      if (i > start || keep_empty) out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, p);
  if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
  return s;
}

Ticks parse_seconds(const std::string& text) {
  std::string t = trim(text);
  bool neg = !t.empty() && t[0] == '-';
  if (neg) t.erase(0, 1);
  auto dot = t.find('.');
  std::string whole = dot == std::string::npos ? t : t.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : t.substr(dot + 1);
  if (whole.empty()) whole = "0";
  auto w = parse_uint(whole);
  if (!w) fail(Errc::ParseError, "bad duration '" + text + "'");
  Ticks ticks = static_cast<Ticks>(*w) * kTicksPerSecond;
  if (!frac.empty()) {
    frac = frac.substr(0, 6);
    while (frac.size() < 6) frac += '0';
    auto f = parse_uint(frac);
    if (!f) fail(Errc::ParseError, "bad duration '" + text + "'");
    ticks += static_cast<Ticks>(*f);
  }
  return neg ? -ticks : ticks;
}

std::string format_ticks(Ticks t) {
  bool neg = t < 0;
  if (neg) t = -t;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", neg ? "-" : "",
                static_cast<long long>(t / kTicksPerSecond),
                static_cast<long long>(t % kTicksPerSecond));
  return buf;
}

void SimClock::schedule_at(Ticks t, std::function<void()> fn) {
  if (t < now_) t = now_;
  queue_.push(Event{t, seq_++, std::move(fn)});
}

bool SimClock::step() {
  if (queue_.empty()) return false;
  Event ev = queue_.top();
  queue_.pop();
  now_ = ev.t;
  ev.fn();
  return true;
}

void SimClock::run_until(Ticks until) {
  while (!queue_.empty() && queue_.top().t <= until) step();
  if (now_ < until) now_ = until;
}

}  // namespace vogrid
