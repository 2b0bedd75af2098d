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
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vogrid::jdl {

// A small ClassAd dialect: attribute -> expression maps used both as job
// descriptions and resource advertisements. Evaluation is total; missing
// attributes and type confusion yield `undefined`, and the boolean
// connectives follow three-valued logic.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Value {
  enum class Kind { Undefined, Bool, Int, Real, Str, List };
  Kind kind = Kind::Undefined;
  bool b = false;
  std::int64_t i = 0;
  double r = 0.0;
  std::string s;
  std::vector<Value> list;

  static Value undefined() { return Value{}; }
  static Value boolean(bool v) { Value x; x.kind = Kind::Bool; x.b = v; return x; }
  static Value integer(std::int64_t v) { Value x; x.kind = Kind::Int; x.i = v; return x; }
  static Value real(double v) { Value x; x.kind = Kind::Real; x.r = v; return x; }
  static Value str(std::string v) { Value x; x.kind = Kind::Str; x.s = std::move(v); return x; }
  static Value list_of(std::vector<Value> v) { Value x; x.kind = Kind::List; x.list = std::move(v); return x; }

  bool is_undefined() const { return kind == Kind::Undefined; }
  bool is_true() const { return kind == Kind::Bool && b; }
  bool numeric() const { return kind == Kind::Int || kind == Kind::Real; }
  double as_real() const { return kind == Kind::Int ? static_cast<double>(i) : r; }
};

enum class BinOp { Eq, Ne, Lt, Le, Gt, Ge, And, Or, Add, Sub, Mul, Div };
enum class UnOp { Not, Neg };
enum class Scope { Self, Other };

struct Expr {
  enum class Kind { Lit, Ref, Unary, Binary, List, Member };
  Kind kind;

  Value lit;                    // Lit
  Scope scope = Scope::Self;    // Ref (bare names are Self)
  bool explicit_scope = false;  // Ref was written as self.X / other.X
  std::string name;             // Ref
  UnOp un{};                    // Unary
  BinOp bin{};                  // Binary
  ExprPtr a, b;                 // Unary uses a; Binary uses a, b; Member uses a (list), b (value)
  std::vector<ExprPtr> items;   // List
};

ExprPtr lit(Value v);
ExprPtr ref(Scope s, std::string name, bool explicit_scope);
ExprPtr unary(UnOp op, ExprPtr a);
ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr list_expr(std::vector<ExprPtr> items);
ExprPtr member_expr(ExprPtr list, ExprPtr value);

ExprPtr true_expr();

/// Attribute map; names are case-insensitive but stored case-preserving.
class ClassAd {
 public:
  void set(const std::string& name, ExprPtr e);
  ExprPtr find(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }
  void erase(const std::string& name);

  const std::vector<std::pair<std::string, ExprPtr>>& attrs() const { return attrs_; }

 private:
  std::vector<std::pair<std::string, ExprPtr>> attrs_;
};

/// Parses the `[ name = expr; ... ]` form. Throws ParseError with
/// "line L, col C" positions.
ClassAd parse_classad(const std::string& text);
/// Parses a single expression (used by tests and the elaborator).
ExprPtr parse_expr(const std::string& text);

/// Canonical printing: attributes sorted case-insensitively, minimal
/// whitespace. parse(print(ad)) is structurally equal to ad.
std::string print(const ClassAd& ad);
std::string print_expr(const Expr& e);

bool equal(const Expr& a, const Expr& b);
bool equal(const ClassAd& a, const ClassAd& b);

/// Total evaluation with the two-scope convention: bare names resolve in
/// `self`; dereferencing other.X flips the scopes for X's own expression.
/// Reference chains deeper than 32 yield undefined.
Value eval(const Expr& e, const ClassAd& self, const ClassAd& other);

/// True iff both sides' Requirements evaluate to true against each other
/// (absent Requirements default to true; undefined counts as false).
bool matches(const ClassAd& job, const ClassAd& resource);

/// Numeric value of job.Rank against the resource; 0.0 when absent,
/// undefined or non-numeric.
double rank(const ClassAd& job, const ClassAd& resource);

// --- JDL / resource-ad conventions -----------------------------------------

/// Returns the ad with a `Requirements = true` inserted when missing.
ClassAd with_default_requirements(ClassAd ad);

/// String items of a list-valued attribute ("Packages", "InputData", ...).
/// A single string value is treated as a one-element list; anything else
/// yields an empty vector.
std::vector<std::string> string_list(const ClassAd& ad, const std::string& attr);

std::optional<std::string> string_attr(const ClassAd& ad, const std::string& attr);
std::optional<std::int64_t> int_attr(const ClassAd& ad, const std::string& attr);

/// Checks the JobAd conventions (Executable present and nonempty). Throws
/// ParseError when violated.
void validate_job_ad(const ClassAd& ad);

/// Checks the ResourceAd conventions (Name present, 0 <= FreeSlots <=
/// MaxSlots). Throws ParseError when violated.
void validate_resource_ad(const ClassAd& ad);

/// Builds a ResourceAd from plain fields.
ClassAd make_resource_ad(const std::string& name, const std::string& site,
                         const std::string& platform, int free_slots, int max_slots,
                         const std::vector<std::string>& installed_packages,
                         const std::vector<std::string>& close_se,
                         const std::string& grid_partition);

}  // namespace vogrid::jdl
