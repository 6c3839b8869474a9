#include "evosteer/reward_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>

#include "evosteer/errors.hpp"

namespace evosteer::dsl {

namespace {

struct FnSig {
  const char* name;
  int min_arity;
  int max_arity;  // -1 = unbounded
};

constexpr FnSig kFunctions[] = {
    {"neg", 1, 1},  {"dist", 2, 2},  {"dot", 2, 2},  {"norm", 1, 1},
    {"abs", 1, 1},  {"exp", 1, 1},   {"min", 2, -1}, {"max", 2, -1},
    {"clamp", 3, 3}, {"gate", 3, 3}, {"vec", 1, -1},
};

const FnSig* find_function(std::string_view name) {
  for (const FnSig& f : kFunctions)
    if (name == f.name) return &f;
  return nullptr;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr run() {
    skip_ws();
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw DslParseError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  bool accept(char c) {
    skip_ws();
    if (!at_end() && peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) throw DslParseError(pos_, what);
  }

  static ExprPtr make(std::size_t offset,
                      std::variant<Number, Ident, Neg, Binary, Call, Index, VecLit> node) {
    auto e = std::make_unique<Expr>();
    e->node = std::move(node);
    e->offset = offset;
    return e;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (at_end()) break;
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(at, Binary{BinOp::add, std::move(lhs), parse_term()});
      } else if (accept('-')) {
        lhs = make(at, Binary{BinOp::sub, std::move(lhs), parse_term()});
      } else {
        break;
      }
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (at_end()) break;
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(at, Binary{BinOp::mul, std::move(lhs), parse_factor()});
      } else if (accept('/')) {
        lhs = make(at, Binary{BinOp::div, std::move(lhs), parse_factor()});
      } else {
        break;
      }
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) {
      ExprPtr inner = parse_factor();
      // Fold a negated literal so printed programs reparse identically.
      if (auto* num = std::get_if<Number>(&inner->node)) {
        num->value = -num->value;
        inner->offset = at;
        return inner;
      }
      return make(at, Neg{std::move(inner)});
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr base = parse_primary();
    for (;;) {
      skip_ws();
      if (at_end() || peek() != '[') break;
      const std::size_t at = pos_;
      ++pos_;
      skip_ws();
      const std::size_t idx_at = pos_;
      int idx = 0;
      bool any = false;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        idx = idx * 10 + (peek() - '0');
        ++pos_;
        any = true;
        if (idx > 1'000'000) throw DslParseError(idx_at, "component index too large");
      }
      if (!any) throw DslParseError(idx_at, "expected nonnegative integer index");
      expect(']', "expected ']' after component index");
      base = make(at, Index{std::move(base), idx});
    }
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (at_end()) throw DslParseError(pos_, "unexpected end of input");
    const std::size_t at = pos_;
    const char c = peek();

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      return parse_number(at);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name(at);
    if (accept('(')) {
      ExprPtr inner = parse_expr();
      if (!accept(')')) throw DslParseError(pos_, "unclosed parenthesis");
      return inner;
    }
    throw DslParseError(at, std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number(std::size_t at) {
    double value = 0.0;
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || !std::isfinite(value))
      throw DslParseError(at, "invalid numeric literal");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make(at, Number{value});
  }

  ExprPtr parse_name(std::size_t at) {
    std::size_t end = pos_;
    while (end < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
      ++end;
    std::string name(src_.substr(pos_, end - pos_));
    pos_ = end;
    skip_ws();
    if (at_end() || peek() != '(') {
      if (find_function(name) != nullptr)
        throw DslParseError(at, "function '" + name + "' requires arguments");
      return make(at, Ident{std::move(name)});
    }

    const FnSig* sig = find_function(name);
    if (sig == nullptr) throw DslParseError(at, "unknown function '" + name + "'");
    ++pos_;  // '('
    std::vector<ExprPtr> args;
    args.push_back(parse_call_arg(name));
    for (;;) {
      skip_ws();
      if (accept(',')) {
        args.push_back(parse_call_arg(name));
        continue;
      }
      if (accept(')')) break;
      throw DslParseError(pos_, "unclosed call to '" + name + "'");
    }
    const int arity = static_cast<int>(args.size());
    if (arity < sig->min_arity || (sig->max_arity >= 0 && arity > sig->max_arity))
      throw DslParseError(at, "function '" + name + "' called with " +
                                  std::to_string(arity) + " arguments");
    if (name == "neg") return make(at, Neg{std::move(args.front())});
    if (name == "vec") return make(at, VecLit{std::move(args)});
    return make(at, Call{std::move(name), std::move(args)});
  }

  ExprPtr parse_call_arg(const std::string& name) {
    skip_ws();
    if (at_end()) throw DslParseError(pos_, "unclosed call to '" + name + "'");
    return parse_expr();
  }
};

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const char* op_token(BinOp op) {
  switch (op) {
    case BinOp::add: return "+";
    case BinOp::sub: return "-";
    case BinOp::mul: return "*";
    case BinOp::div: return "/";
  }
  return "?";
}

void print_into(const Expr& e, std::string& out);

void print_operand(const Expr& e, std::string& out) {
  if (std::holds_alternative<Binary>(e.node)) {
    out += '(';
    print_into(e, out);
    out += ')';
  } else {
    print_into(e, out);
  }
}

void print_into(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Number>) {
          out += format_number(node.value);
        } else if constexpr (std::is_same_v<T, Ident>) {
          out += node.name;
        } else if constexpr (std::is_same_v<T, Neg>) {
          out += "neg(";
          print_into(*node.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, Binary>) {
          print_operand(*node.lhs, out);
          out += ' ';
          out += op_token(node.op);
          out += ' ';
          print_operand(*node.rhs, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          out += node.fn;
          out += '(';
          for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) out += ", ";
            print_into(*node.args[i], out);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, Index>) {
          print_operand(*node.base, out);
          out += '[';
          out += std::to_string(node.index);
          out += ']';
        } else if constexpr (std::is_same_v<T, VecLit>) {
          out += "vec(";
          for (std::size_t i = 0; i < node.elems.size(); ++i) {
            if (i) out += ", ";
            print_into(*node.elems[i], out);
          }
          out += ')';
        }
      },
      e.node);
}

// ---- evaluation ----

bool is_scalar(const Value& v) { return std::holds_alternative<double>(v); }
double as_scalar(const Value& v, const char* ctx) {
  if (!is_scalar(v)) throw DslEvalError(std::string(ctx) + " expects a scalar");
  return std::get<double>(v);
}
const Vec& as_vector(const Value& v, const char* ctx) {
  if (is_scalar(v)) throw DslEvalError(std::string(ctx) + " expects a vector");
  return std::get<Vec>(v);
}

double checked(double x, const char* ctx) {
  if (!std::isfinite(x))
    throw DslEvalError(std::string("non-finite value in ") + ctx);
  return x;
}

Value eval_node(const Expr& e, const Scope& scope);

Value eval_binary(const Binary& b, const Scope& scope) {
  const Value lhs = eval_node(*b.lhs, scope);
  const Value rhs = eval_node(*b.rhs, scope);
  const bool ls = is_scalar(lhs);
  const bool rs = is_scalar(rhs);

  switch (b.op) {
    case BinOp::add:
    case BinOp::sub: {
      const double sign = b.op == BinOp::add ? 1.0 : -1.0;
      if (ls && rs)
        return checked(std::get<double>(lhs) + sign * std::get<double>(rhs), "arithmetic");
      if (!ls && !rs) {
        const Vec& a = std::get<Vec>(lhs);
        const Vec& c = std::get<Vec>(rhs);
        if (a.size() != c.size())
          throw DslEvalError("vector arithmetic requires equal lengths");
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
          out[i] = checked(a[i] + sign * c[i], "arithmetic");
        return out;
      }
      throw DslEvalError("vector/scalar type mismatch in '+'/'-'");
    }
    case BinOp::mul: {
      if (ls && rs)
        return checked(std::get<double>(lhs) * std::get<double>(rhs), "arithmetic");
      if (ls != rs) {
        const double s = std::get<double>(ls ? lhs : rhs);
        const Vec& v = std::get<Vec>(ls ? rhs : lhs);
        Vec out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = checked(s * v[i], "arithmetic");
        return out;
      }
      throw DslEvalError("vector/scalar type mismatch in '*' (use dot for vectors)");
    }
    case BinOp::div: {
      const double den = as_scalar(rhs, "divisor");
      if (den == 0.0) throw DslEvalError("division by zero");
      if (ls) return checked(std::get<double>(lhs) / den, "arithmetic");
      const Vec& v = std::get<Vec>(lhs);
      Vec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = checked(v[i] / den, "arithmetic");
      return out;
    }
  }
  throw DslEvalError("unknown binary operator");
}

Value eval_call(const Call& c, const Scope& scope) {
  const auto arg = [&](std::size_t i) { return eval_node(*c.args[i], scope); };

  if (c.fn == "dist") {
    const Value a = arg(0), b = arg(1);
    const Vec& va = as_vector(a, "dist");
    const Vec& vb = as_vector(b, "dist");
    if (va.size() != vb.size()) throw DslEvalError("dist requires equal-length vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) s += (va[i] - vb[i]) * (va[i] - vb[i]);
    return checked(std::sqrt(s), "dist");
  }
  if (c.fn == "dot") {
    const Value a = arg(0), b = arg(1);
    const Vec& va = as_vector(a, "dot");
    const Vec& vb = as_vector(b, "dot");
    if (va.size() != vb.size()) throw DslEvalError("dot requires equal-length vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
    return checked(s, "dot");
  }
  if (c.fn == "norm") {
    const Value a = arg(0);
    const Vec& v = as_vector(a, "norm");
    double s = 0.0;
    for (double x : v) s += x * x;
    return checked(std::sqrt(s), "norm");
  }
  if (c.fn == "abs") return checked(std::abs(as_scalar(arg(0), "abs")), "abs");
  if (c.fn == "exp") return checked(std::exp(as_scalar(arg(0), "exp")), "exp");
  if (c.fn == "min" || c.fn == "max") {
    const bool take_min = c.fn == "min";
    double best = as_scalar(arg(0), c.fn.c_str());
    for (std::size_t i = 1; i < c.args.size(); ++i) {
      const double x = as_scalar(arg(i), c.fn.c_str());
      best = take_min ? std::min(best, x) : std::max(best, x);
    }
    return best;
  }
  if (c.fn == "clamp") {
    const double x = as_scalar(arg(0), "clamp");
    const double lo = as_scalar(arg(1), "clamp");
    const double hi = as_scalar(arg(2), "clamp");
    if (lo > hi) throw DslEvalError("clamp requires lo <= hi");
    return std::clamp(x, lo, hi);
  }
  if (c.fn == "gate") {
    // Only the selected branch is evaluated.
    const double cond = as_scalar(arg(0), "gate condition");
    return eval_node(cond > 0.0 ? *c.args[1] : *c.args[2], scope);
  }
  throw DslEvalError("unknown function '" + c.fn + "'");
}

Value eval_node(const Expr& e, const Scope& scope) {
  return std::visit(
      [&](const auto& node) -> Value {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Number>) {
          return node.value;
        } else if constexpr (std::is_same_v<T, Ident>) {
          const auto it = scope.find(node.name);
          if (it == scope.end())
            throw DslEvalError("unbound identifier '" + node.name + "'");
          return it->second;
        } else if constexpr (std::is_same_v<T, Neg>) {
          return -as_scalar(eval_node(*node.arg, scope), "neg");
        } else if constexpr (std::is_same_v<T, Binary>) {
          return eval_binary(node, scope);
        } else if constexpr (std::is_same_v<T, Call>) {
          return eval_call(node, scope);
        } else if constexpr (std::is_same_v<T, Index>) {
          const Value base = eval_node(*node.base, scope);
          const Vec& v = as_vector(base, "component access");
          if (node.index < 0 || static_cast<std::size_t>(node.index) >= v.size())
            throw DslEvalError("component index " + std::to_string(node.index) +
                               " out of range for vector of length " +
                               std::to_string(v.size()));
          return v[static_cast<std::size_t>(node.index)];
        } else {
          const VecLit& lit = node;
          Vec out;
          out.reserve(lit.elems.size());
          for (const ExprPtr& el : lit.elems)
            out.push_back(as_scalar(eval_node(*el, scope), "vec element"));
          return out;
        }
      },
      e.node);
}

void collect_identifiers(const Expr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Ident>) {
          if (std::find(out.begin(), out.end(), node.name) == out.end())
            out.push_back(node.name);
        } else if constexpr (std::is_same_v<T, Neg>) {
          collect_identifiers(*node.arg, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_identifiers(*node.lhs, out);
          collect_identifiers(*node.rhs, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const ExprPtr& a : node.args) collect_identifiers(*a, out);
        } else if constexpr (std::is_same_v<T, Index>) {
          collect_identifiers(*node.base, out);
        } else if constexpr (std::is_same_v<T, VecLit>) {
          for (const ExprPtr& a : node.elems) collect_identifiers(*a, out);
        }
      },
      e.node);
}

}  // namespace

ExprPtr clone(const Expr& e) {
  auto out = std::make_unique<Expr>();
  out->offset = e.offset;
  out->node = std::visit(
      [](const auto& node) -> decltype(out->node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Number> || std::is_same_v<T, Ident>) {
          return node;
        } else if constexpr (std::is_same_v<T, Neg>) {
          return Neg{clone(*node.arg)};
        } else if constexpr (std::is_same_v<T, Binary>) {
          return Binary{node.op, clone(*node.lhs), clone(*node.rhs)};
        } else if constexpr (std::is_same_v<T, Call>) {
          Call c{node.fn, {}};
          for (const ExprPtr& a : node.args) c.args.push_back(clone(*a));
          return c;
        } else if constexpr (std::is_same_v<T, Index>) {
          return Index{clone(*node.base), node.index};
        } else {
          VecLit v;
          for (const ExprPtr& a : node.elems) v.elems.push_back(clone(*a));
          return v;
        }
      },
      e.node);
  return out;
}

bool ast_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Number>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<T, Ident>) {
          return na.name == nb.name;
        } else if constexpr (std::is_same_v<T, Neg>) {
          return ast_equal(*na.arg, *nb.arg);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return na.op == nb.op && ast_equal(*na.lhs, *nb.lhs) && ast_equal(*na.rhs, *nb.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          if (na.fn != nb.fn || na.args.size() != nb.args.size()) return false;
          for (std::size_t i = 0; i < na.args.size(); ++i)
            if (!ast_equal(*na.args[i], *nb.args[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Index>) {
          return na.index == nb.index && ast_equal(*na.base, *nb.base);
        } else {
          if (na.elems.size() != nb.elems.size()) return false;
          for (std::size_t i = 0; i < na.elems.size(); ++i)
            if (!ast_equal(*na.elems[i], *nb.elems[i])) return false;
          return true;
        }
      },
      a.node);
}

RewardProgram parse(std::string_view source) {
  Parser parser(source);
  return RewardProgram(std::string(source), parser.run());
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

std::string print(const RewardProgram& prog) {
  if (!prog.valid()) throw Error("print: invalid program");
  return print_expr(prog.ast());
}

double evaluate(const RewardProgram& prog, const Scope& scope) {
  if (!prog.valid()) throw Error("evaluate: invalid program");
  for (const auto& [name, value] : scope) {
    if (is_scalar(value)) {
      if (!std::isfinite(std::get<double>(value)))
        throw DslEvalError("scope value '" + name + "' is not finite");
    } else {
      if (!all_finite(std::get<Vec>(value)))
        throw DslEvalError("scope value '" + name + "' is not finite");
    }
  }
  const Value v = eval_node(prog.ast(), scope);
  if (!is_scalar(v)) throw DslEvalError("reward must evaluate to a scalar");
  return checked(std::get<double>(v), "reward");
}

std::vector<std::string> free_identifiers(const Expr& e) {
  std::vector<std::string> out;
  collect_identifiers(e, out);
  return out;
}

void check_scope(const RewardProgram& prog, const Scope& scope) {
  if (!prog.valid()) throw Error("check_scope: invalid program");
  for (const std::string& name : free_identifiers(prog.ast()))
    if (scope.find(name) == scope.end())
      throw DslEvalError("unbound identifier '" + name + "'");
}

}  // namespace evosteer::dsl
