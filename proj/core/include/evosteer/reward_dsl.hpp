#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evosteer/linalg.hpp"

namespace evosteer::dsl {

// Expression grammar (EBNF, also published in the README):
//
//   expr    = term { ("+" | "-") term } ;
//   term    = factor { ("*" | "/") factor } ;
//   factor  = "-" factor | postfix ;
//   postfix = primary { "[" integer "]" } ;
//   primary = number | identifier | call | "(" expr ")" ;
//   call    = fname "(" expr { "," expr } ")" ;
//   fname   = "neg" | "dist" | "dot" | "norm" | "abs" | "exp"
//           | "min" | "max" | "clamp" | "gate" | "vec" ;
//
// No loops or recursion: every program terminates. Unary minus on a numeric
// literal folds into the literal, so printed programs reparse to the same
// tree.

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinOp { add, sub, mul, div };

struct Number {
  double value;
};
struct Ident {
  std::string name;
};
struct Neg {
  ExprPtr arg;
};
struct Binary {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  std::string fn;
  std::vector<ExprPtr> args;
};
struct Index {
  ExprPtr base;
  int index;
};
struct VecLit {
  std::vector<ExprPtr> elems;
};

struct Expr {
  std::variant<Number, Ident, Neg, Binary, Call, Index, VecLit> node;
  std::size_t offset = 0;  // byte offset into the source, for diagnostics
};

ExprPtr clone(const Expr& e);
bool ast_equal(const Expr& a, const Expr& b);

/// A parsed reward program R(a; c). Holds the original source and the AST.
class RewardProgram {
 public:
  RewardProgram() = default;
  RewardProgram(std::string source, ExprPtr ast)
      : source_(std::move(source)), ast_(std::move(ast)) {}
  RewardProgram(const RewardProgram& other)
      : source_(other.source_), ast_(other.ast_ ? clone(*other.ast_) : nullptr) {}
  RewardProgram& operator=(const RewardProgram& other) {
    if (this != &other) {
      source_ = other.source_;
      ast_ = other.ast_ ? clone(*other.ast_) : nullptr;
    }
    return *this;
  }
  RewardProgram(RewardProgram&&) = default;
  RewardProgram& operator=(RewardProgram&&) = default;

  const std::string& source() const { return source_; }
  const Expr& ast() const { return *ast_; }
  bool valid() const { return ast_ != nullptr; }

 private:
  std::string source_;
  ExprPtr ast_;
};

/// Values are scalars or vectors; names are bound exactly once.
using Value = std::variant<double, Vec>;
using Scope = std::map<std::string, Value>;

RewardProgram parse(std::string_view source);

/// Canonical text form; parse(print(p)) is structurally equal to p. Nested
/// binary operands are parenthesized explicitly.
std::string print(const RewardProgram& prog);
std::string print_expr(const Expr& e);

/// Evaluates to a finite scalar. Unbound identifiers, type mismatches,
/// division by zero and non-finite intermediates raise DslEvalError; the
/// result is never NaN. gate() evaluates only the selected branch.
double evaluate(const RewardProgram& prog, const Scope& scope);

/// Identifiers referenced by the program, in first-appearance order.
std::vector<std::string> free_identifiers(const Expr& e);

/// Throws DslEvalError naming the first identifier not bound in scope.
void check_scope(const RewardProgram& prog, const Scope& scope);

}  // namespace evosteer::dsl
