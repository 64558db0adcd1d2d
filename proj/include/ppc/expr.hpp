#pragma once

/**
 * @file expr.hpp
 * @brief Scalar-field expressions over the chart coordinates.
 *
 * Grammar (whitespace-insensitive):
 *
 *     expr    := term (('+' | '-') term)*
 *     term    := unary (('*' | '/') unary)*
 *     unary   := ('-' | '+') unary | power
 *     power   := primary ('^' exponent)?
 *     exponent:= ['-' | '+'] INTEGER ('^' exponent)?
 *     primary := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
 *
 * Identifiers x, y, z are the chart coordinates; any other identifier is a
 * named constant resolved from Bindings at evaluation time. Exponents are
 * integer literals only.
 */

#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ppc/errors.hpp"
#include "ppc/jet.hpp"

namespace ppc {

using Bindings = std::map<std::string, double>;

/// Throws SchemaError unless epsilon (if bound) is exactly +1 or -1.
inline void validate_bindings(const Bindings &env) {
  if (auto it = env.find("epsilon"); it != env.end() && it->second != 1.0 && it->second != -1.0)
    throw SchemaError("epsilon must be +1 or -1, got " + std::to_string(it->second));
}

class Expr;

namespace ast {

struct Number {
  double value;
  friend bool operator==(const Number &, const Number &) = default;
};
struct Ident {
  std::string name;
  friend bool operator==(const Ident &, const Ident &) = default;
};
struct Unary {
  UnaryFn fn;
  std::shared_ptr<const struct Node> arg;
};
struct Binary {
  BinaryOp op;
  std::shared_ptr<const struct Node> lhs, rhs;
};
struct Power {
  std::shared_ptr<const struct Node> base;
  long exponent;
};

struct Node {
  std::variant<Number, Ident, Unary, Binary, Power> v;
};

using NodePtr = std::shared_ptr<const Node>;

inline bool equal(const NodePtr &a, const NodePtr &b) {
  if (a == b) return true;
  if (!a || !b || a->v.index() != b->v.index()) return false;
  return std::visit(
      [&](const auto &x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto &y = std::get<T>(b->v);
        if constexpr (std::is_same_v<T, Number>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Ident>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.fn == y.fn && equal(x.arg, y.arg);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
        } else {
          return x.exponent == y.exponent && equal(x.base, y.base);
        }
      },
      a->v);
}

} // namespace ast

inline const std::map<std::string, UnaryFn, std::less<>> &function_table() {
  static const std::map<std::string, UnaryFn, std::less<>> table{
      {"exp", UnaryFn::exp},   {"log", UnaryFn::log}, {"sqrt", UnaryFn::sqrt}, {"sin", UnaryFn::sin},
      {"cos", UnaryFn::cos},   {"sinh", UnaryFn::sinh}, {"cosh", UnaryFn::cosh}};
  return table;
}

inline std::string function_name(UnaryFn fn) {
  for (const auto &[name, f] : function_table())
    if (f == fn) return name;
  return "-";
}

inline bool is_coordinate(std::string_view name) { return name == "x" || name == "y" || name == "z"; }

/// Immutable parsed expression. Cheap to copy; shares its tree.
class Expr {
public:
  Expr() : root_(make(ast::Number{0.0})) {}
  explicit Expr(ast::NodePtr root) : root_(std::move(root)) {}

  static Expr number(double v) {
    if (v < 0.0 || (v == 0.0 && std::signbit(v)))
      return Expr(make(ast::Unary{UnaryFn::neg, make(ast::Number{-v})}));
    return Expr(make(ast::Number{v}));
  }
  static Expr ident(std::string name) { return Expr(make(ast::Ident{std::move(name)})); }
  static Expr call(UnaryFn fn, const Expr &a) { return Expr(make(ast::Unary{fn, a.root_})); }
  static Expr power(const Expr &a, long n) { return Expr(make(ast::Power{a.root_, n})); }

  friend Expr operator+(const Expr &a, const Expr &b) { return bin(BinaryOp::add, a, b); }
  friend Expr operator-(const Expr &a, const Expr &b) { return bin(BinaryOp::sub, a, b); }
  friend Expr operator*(const Expr &a, const Expr &b) { return bin(BinaryOp::mul, a, b); }
  friend Expr operator/(const Expr &a, const Expr &b) { return bin(BinaryOp::div, a, b); }
  friend Expr operator-(const Expr &a) { return call(UnaryFn::neg, a); }

  friend bool operator==(const Expr &a, const Expr &b) { return ast::equal(a.root_, b.root_); }

  const ast::NodePtr &root() const { return root_; }

  /// Numeric literal value, if the whole expression is one (possibly negated).
  std::optional<double> literal() const {
    if (const auto *n = std::get_if<ast::Number>(&root_->v)) return n->value;
    if (const auto *u = std::get_if<ast::Unary>(&root_->v); u && u->fn == UnaryFn::neg)
      if (const auto *n = std::get_if<ast::Number>(&u->arg->v)) return -n->value;
    return std::nullopt;
  }

  std::set<std::string> identifiers() const {
    std::set<std::string> out;
    collect(root_, out);
    return out;
  }

  /// True when the expression references none of x, y, z.
  bool is_constant() const {
    for (const auto &n : identifiers())
      if (is_coordinate(n)) return false;
    return true;
  }

  /// Replaces every occurrence of identifier `name` by `replacement`.
  Expr substitute(const std::string &name, const Expr &replacement) const {
    return Expr(subst(root_, name, replacement.root_));
  }

  template <typename... Args> static ast::NodePtr make(Args &&...args) {
    return std::make_shared<const ast::Node>(ast::Node{std::forward<Args>(args)...});
  }

private:
  static Expr bin(BinaryOp op, const Expr &a, const Expr &b) {
    return Expr(make(ast::Binary{op, a.root_, b.root_}));
  }

  static void collect(const ast::NodePtr &n, std::set<std::string> &out) {
    std::visit(
        [&](const auto &x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ast::Ident>) {
            out.insert(x.name);
          } else if constexpr (std::is_same_v<T, ast::Unary>) {
            collect(x.arg, out);
          } else if constexpr (std::is_same_v<T, ast::Binary>) {
            collect(x.lhs, out);
            collect(x.rhs, out);
          } else if constexpr (std::is_same_v<T, ast::Power>) {
            collect(x.base, out);
          }
        },
        n->v);
  }

  static ast::NodePtr subst(const ast::NodePtr &n, const std::string &name, const ast::NodePtr &rep) {
    return std::visit(
        [&](const auto &x) -> ast::NodePtr {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ast::Ident>) {
            return x.name == name ? rep : n;
          } else if constexpr (std::is_same_v<T, ast::Unary>) {
            return make(ast::Unary{x.fn, subst(x.arg, name, rep)});
          } else if constexpr (std::is_same_v<T, ast::Binary>) {
            return make(ast::Binary{x.op, subst(x.lhs, name, rep), subst(x.rhs, name, rep)});
          } else if constexpr (std::is_same_v<T, ast::Power>) {
            return make(ast::Power{subst(x.base, name, rep), x.exponent});
          } else {
            return n;
          }
        },
        n->v);
  }

  ast::NodePtr root_;
};

namespace detail {

class Parser {
public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("operator or end of input", "unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string &expected, const std::string &msg) const {
    throw SyntaxError(pos_, expected, msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * unary();
      } else if (accept('/')) {
        lhs = lhs / unary();
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::power(base, exponent());
    return base;
  }

  long exponent() {
    skip_ws();
    bool neg = false;
    if (accept('-')) {
      neg = true;
    } else {
      accept('+');
    }
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
    if (start == pos_) fail("integer exponent", "exponent must be an integer literal");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      fail("integer exponent", "exponent must be an integer literal");
    long n = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, n);
    if (ec != std::errc()) {
      pos_ = start;
      fail("integer exponent", "exponent out of range");
    }
    if (neg) n = -n;
    if (accept('^')) {
      const std::size_t at = pos_;
      const long m = exponent();
      if (m < 0) {
        pos_ = at;
        fail("non-negative integer exponent", "negative exponent in an exponent chain");
      }
      long r = 1;
      for (long i = 0; i < m; ++i) r *= n;
      n = r;
    }
    return n;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("number, identifier or '('", "unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("')'", "unbalanced parenthesis");
      return e;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        const auto &table = function_table();
        auto it = table.find(name);
        if (it == table.end()) throw UnknownFunction("unknown function '" + name + "' at byte " + std::to_string(start));
        ++pos_;
        Expr arg = expr();
        if (!accept(')')) fail("')'", "unterminated function call");
        return Expr::call(it->second, arg);
      }
      return Expr::ident(std::move(name));
    }
    fail("number, identifier or '('", "unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && is_digit(s_[q])) {
        pos_ = q;
        while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_) {
      pos_ = start;
      fail("number", "malformed number");
    }
    return Expr(Expr::make(ast::Number{v}));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline int precedence(const ast::NodePtr &n) {
  return std::visit(
      [](const auto &x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Binary>) {
          return (x.op == BinaryOp::add || x.op == BinaryOp::sub) ? 1 : 2;
        } else if constexpr (std::is_same_v<T, ast::Unary>) {
          return x.fn == UnaryFn::neg ? 3 : 5;
        } else if constexpr (std::is_same_v<T, ast::Power>) {
          return 4;
        } else if constexpr (std::is_same_v<T, ast::Number>) {
          return x.value < 0.0 ? 0 : 5;
        } else {
          return 5;
        }
      },
      n->v);
}

inline void print(const ast::NodePtr &n, std::string &out) {
  auto wrap = [&out](const ast::NodePtr &child, bool parens) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
  };
  std::visit(
      [&](const auto &x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Number>) {
          out += format_double(x.value);
        } else if constexpr (std::is_same_v<T, ast::Ident>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, ast::Unary>) {
          if (x.fn == UnaryFn::neg) {
            out += '-';
            wrap(x.arg, precedence(x.arg) < 3);
          } else {
            out += function_name(x.fn);
            wrap(x.arg, true);
          }
        } else if constexpr (std::is_same_v<T, ast::Binary>) {
          const int p = (x.op == BinaryOp::add || x.op == BinaryOp::sub) ? 1 : 2;
          wrap(x.lhs, precedence(x.lhs) < p);
          static constexpr const char *ops[] = {" + ", " - ", "*", "/"};
          out += ops[static_cast<int>(x.op)];
          wrap(x.rhs, precedence(x.rhs) <= p);
        } else {
          wrap(x.base, precedence(x.base) < 5);
          out += '^';
          out += std::to_string(x.exponent);
        }
      },
      n->v);
}

} // namespace detail

/// Parses an expression; throws SyntaxError or UnknownFunction.
inline Expr parse(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical text form; parse(to_string(e)) == e.
inline std::string to_string(const Expr &e) {
  std::string out;
  detail::print(e.root(), out);
  return out;
}

namespace detail {
inline Jet2 eval(const ast::NodePtr &n, const ChartPoint &p, const Bindings &env) {
  return std::visit(
      [&](const auto &x) -> Jet2 {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ast::Number>) {
          return Jet2(x.value);
        } else if constexpr (std::is_same_v<T, ast::Ident>) {
          if (x.name == "x") return jet_seed(p, Coord::x);
          if (x.name == "y") return jet_seed(p, Coord::y);
          if (x.name == "z") return jet_seed(p, Coord::z);
          auto it = env.find(x.name);
          if (it == env.end()) throw UnboundIdentifier("unbound identifier '" + x.name + "'");
          return Jet2(it->second);
        } else if constexpr (std::is_same_v<T, ast::Unary>) {
          return jet_unary(eval(x.arg, p, env), x.fn);
        } else if constexpr (std::is_same_v<T, ast::Binary>) {
          return jet_arith(eval(x.lhs, p, env), eval(x.rhs, p, env), x.op);
        } else {
          return pow(eval(x.base, p, env), x.exponent);
        }
      },
      n->v);
}
} // namespace detail

/// Jet of the expression at p; constants carry zero derivatives.
inline Jet2 eval_jet(const Expr &e, const ChartPoint &p, const Bindings &env) {
  return detail::eval(e.root(), p, env);
}

} // namespace ppc
