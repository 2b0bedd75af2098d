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

#include <algorithm>
#include <string>
#include <vector>

#include "vogrid/errors.hpp"
#include "vogrid/time.hpp"

namespace vogrid {

/// Toy stand-in for the real authentication stack: a token names its subject
/// and is honored for a limited simulated lifetime.
struct AccessToken {
  std::string subject;
  Ticks issued_at = 0;
  Ticks ttl = 3600 * kTicksPerSecond;

  bool expired(Ticks now) const { return now >= issued_at + ttl; }
};

struct Principal {
  std::string user;
  std::vector<std::string> groups;
  std::vector<std::string> roles;
  AccessToken token;

  bool has_role(const std::string& r) const {
    return std::find(roles.begin(), roles.end(), r) != roles.end();
  }
  bool in_group(const std::string& g) const {
    return std::find(groups.begin(), groups.end(), g) != groups.end();
  }
  bool is_admin() const { return has_role("admin"); }

  /// Primary group used as the group owner of new catalogue entries.
  std::string primary_group() const { return groups.empty() ? user : groups.front(); }
};

class TokenService {
 public:
  TokenService() = default;
  explicit TokenService(TimeFn now, Ticks ttl = 3600 * kTicksPerSecond)
      : now_(std::move(now)), ttl_(ttl) {}

  AccessToken issue(const std::string& user) const {
    return AccessToken{user, now_ ? now_() : 0, ttl_};
  }

  void check(const Principal& p) const {
    Ticks now = now_ ? now_() : 0;
    if (p.token.subject != p.user || p.token.expired(now))
      fail(Errc::AuthExpired, "token for '" + p.user + "' expired; re-authenticate");
  }

  void renew(Principal& p) const { p.token = issue(p.user); }

  Ticks ttl() const { return ttl_; }

 private:
  TimeFn now_;
  Ticks ttl_ = 3600 * kTicksPerSecond;
};

}  // namespace vogrid
