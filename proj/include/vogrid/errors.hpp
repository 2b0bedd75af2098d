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

#include <stdexcept>
#include <string>

namespace vogrid {

/// Domain error kinds. Every throwing operation reports exactly one of these,
/// and the CLI maps them 1:1 to one-line stderr messages.
enum class Errc {
  NotFound,
  PermissionDenied,
  AlreadyExists,
  Duplicate,
  UnknownSE,
  SymlinkLoop,
  UnknownJob,
  BadSchema,
  NoSuchTag,
  TypeMismatch,
  ParseError,
  AuthExpired,
  UnknownPackage,
  UnknownCommand,
  VersionConflict,
  CycleDetected,
  NotInstalled,
  IllegalTransition,
  StaleReport,
  Terminal,
  AlreadyReplicated,
  InsufficientSpace,
  IntegrityError,
  EmptyDataset,
  NoResults,
  NameClash,
  UnknownTarget,
  NotEmpty,
  InvalidArgument,
  ServiceDown,
  InvariantViolation,
};

const char* errc_name(Errc c);

class GridError : public std::runtime_error {
 public:
  GridError(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw GridError(code, msg);
}

}  // namespace vogrid
