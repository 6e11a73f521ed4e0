#pragma once

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "errors.hpp"

namespace fraclyap {

// Expressions in one real variable:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | 'pi' | 'e' | var | func '(' expr ')' | '(' expr ')'
//   func    := exp | ln | sin | cos | sqrt | abs

enum class NodeKind { Number, Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

enum class Function { Exp, Ln, Sin, Cos, Sqrt, Abs };

inline constexpr std::array<std::string_view, 6> kFunctionNames = {"exp", "ln",   "sin",
                                                                   "cos", "sqrt", "abs"};

inline std::optional<Function> function_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == name) {
      return static_cast<Function>(i);
    }
  }
  return std::nullopt;
}

inline std::string_view function_name(Function f) {
  return kFunctionNames[static_cast<std::size_t>(f)];
}

struct Node {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;         // Number, Constant
  std::string name;           // Constant, Variable
  Function func = Function::Exp;
  std::unique_ptr<Node> lhs;  // unary operand / left operand / call argument
  std::unique_ptr<Node> rhs;
};

namespace detail {

inline int precedence(const Node& n) {
  switch (n.kind) {
  case NodeKind::Add:
  case NodeKind::Sub:
    return 1;
  case NodeKind::Mul:
  case NodeKind::Div:
    return 2;
  case NodeKind::Negate:
    return 3;
  case NodeKind::Pow:
    return 4;
  default:
    return 5;
  }
}

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline void print_node(const Node& n, std::string& out);

inline void print_child(const Node& child, bool parens, std::string& out) {
  if (parens) {
    out += '(';
  }
  print_node(child, out);
  if (parens) {
    out += ')';
  }
}

inline void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
  case NodeKind::Number:
    out += format_number(n.value);
    return;
  case NodeKind::Constant:
  case NodeKind::Variable:
    out += n.name;
    return;
  case NodeKind::Negate:
    out += '-';
    print_child(*n.lhs, precedence(*n.lhs) < 3, out);
    return;
  case NodeKind::Call:
    out += function_name(n.func);
    out += '(';
    print_node(*n.lhs, out);
    out += ')';
    return;
  case NodeKind::Pow:
    print_child(*n.lhs, precedence(*n.lhs) <= 4, out);
    out += '^';
    print_child(*n.rhs, precedence(*n.rhs) < 3, out);
    return;
  default: {
    const int p = precedence(n);
    const char op = n.kind == NodeKind::Add   ? '+'
                    : n.kind == NodeKind::Sub ? '-'
                    : n.kind == NodeKind::Mul ? '*'
                                              : '/';
    print_child(*n.lhs, precedence(*n.lhs) < p, out);
    out += op;
    print_child(*n.rhs, precedence(*n.rhs) <= p, out);
    return;
  }
  }
}

inline bool nodes_equal(const Node& x, const Node& y) {
  if (x.kind != y.kind) {
    return false;
  }
  switch (x.kind) {
  case NodeKind::Number:
    return x.value == y.value;
  case NodeKind::Constant:
  case NodeKind::Variable:
    return x.name == y.name;
  case NodeKind::Negate:
    return nodes_equal(*x.lhs, *y.lhs);
  case NodeKind::Call:
    return x.func == y.func && nodes_equal(*x.lhs, *y.lhs);
  default:
    return nodes_equal(*x.lhs, *y.lhs) && nodes_equal(*x.rhs, *y.rhs);
  }
}

[[noreturn]] inline void domain_fail(const std::string& what, double x) {
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " (argument " << x << ")";
  throw DomainError(msg.str());
}

inline double checked(double v, const char* what, double x) {
  if (!std::isfinite(v)) {
    domain_fail(std::string("non-finite result in ") + what, x);
  }
  return v;
}

inline double eval_node(const Node& n, double x) {
  switch (n.kind) {
  case NodeKind::Number:
  case NodeKind::Constant:
    return n.value;
  case NodeKind::Variable:
    return x;
  case NodeKind::Negate:
    return -eval_node(*n.lhs, x);
  case NodeKind::Add:
    return checked(eval_node(*n.lhs, x) + eval_node(*n.rhs, x), "addition", x);
  case NodeKind::Sub:
    return checked(eval_node(*n.lhs, x) - eval_node(*n.rhs, x), "subtraction", x);
  case NodeKind::Mul:
    return checked(eval_node(*n.lhs, x) * eval_node(*n.rhs, x), "multiplication", x);
  case NodeKind::Div: {
    const double num = eval_node(*n.lhs, x);
    const double den = eval_node(*n.rhs, x);
    if (den == 0.0) {
      domain_fail("division by zero", x);
    }
    return checked(num / den, "division", x);
  }
  case NodeKind::Pow: {
    const double base = eval_node(*n.lhs, x);
    const double expo = eval_node(*n.rhs, x);
    if (base == 0.0 && expo < 0.0) {
      domain_fail("zero raised to a negative power", x);
    }
    if (base < 0.0 && expo != std::trunc(expo)) {
      domain_fail("negative base with non-integer exponent", x);
    }
    return checked(std::pow(base, expo), "power", x);
  }
  case NodeKind::Call: {
    const double arg = eval_node(*n.lhs, x);
    switch (n.func) {
    case Function::Exp:
      return checked(std::exp(arg), "exp", x);
    case Function::Ln:
      if (!(arg > 0.0)) {
        domain_fail("ln of non-positive value", x);
      }
      return std::log(arg);
    case Function::Sin:
      return std::sin(arg);
    case Function::Cos:
      return std::cos(arg);
    case Function::Sqrt:
      if (arg < 0.0) {
        domain_fail("sqrt of negative value", x);
      }
      return std::sqrt(arg);
    case Function::Abs:
      return std::fabs(arg);
    }
  }
  }
  return 0.0;
}

class Parser {
public:
  Parser(std::string_view text, std::string_view var) : text_(text), var_(var) {}

  std::unique_ptr<Node> parse() {
    skip_ws();
    if (pos_ == text_.size()) {
      throw ParseError("empty expression", pos_);
    }
    auto root = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return root;
  }

private:
  static std::unique_ptr<Node> binary(NodeKind kind, std::unique_ptr<Node> l,
                                      std::unique_ptr<Node> r) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::unique_ptr<Node> expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(NodeKind::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(NodeKind::Sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(NodeKind::Mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = binary(NodeKind::Div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> unary() {
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Negate;
      n->lhs = unary();
      return n;
    }
    return power();
  }

  std::unique_ptr<Node> power() {
    auto base = primary();
    if (accept('^')) {
      return binary(NodeKind::Pow, std::move(base), unary());
    }
    return base;
  }

  std::unique_ptr<Node> primary() {
    skip_ws();
    if (pos_ == text_.size()) {
      throw ParseError("unexpected end of expression", pos_);
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return identifier();
    }
    if (accept('(')) {
      auto inner = expr();
      if (!accept(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::unique_ptr<Node> number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      throw ParseError("malformed number", start);
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      // Only an exponent if digits follow; otherwise "2e" is a syntax error
      // rather than "2 * e".
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (digits() == 0) {
        throw ParseError("malformed exponent", save);
      }
    }
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::Number;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n->value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(n->value)) {
      throw ParseError("number out of range", start);
    }
    return n;
  }

  std::unique_ptr<Node> identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';

    if (auto func = function_from_name(name)) {
      if (!call) {
        throw ParseError("function '" + std::string(name) + "' expects one argument", start);
      }
      ++pos_;
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Call;
      n->func = *func;
      n->lhs = expr();
      if (accept(',')) {
        throw ParseError("function '" + std::string(name) + "' takes exactly one argument",
                         pos_ - 1);
      }
      if (!accept(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return n;
    }

    auto n = std::make_unique<Node>();
    n->name = std::string(name);
    if (name == var_) {
      n->kind = NodeKind::Variable;
    } else if (name == "pi") {
      n->kind = NodeKind::Constant;
      n->value = std::numbers::pi;
    } else if (name == "e") {
      n->kind = NodeKind::Constant;
      n->value = std::numbers::e;
    } else {
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    if (call) {
      throw ParseError("'" + std::string(name) + "' is not a function", pos_);
    }
    return n;
  }

  std::string_view text_;
  std::string_view var_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Immutable parsed expression in one variable. Copies share the tree;
/// evaluation is reentrant.
class Expression {
public:
  Expression() = default;

  double operator()(double x) const { return evaluate(x); }

  /// Throws DomainError for undefined or non-finite results.
  double evaluate(double x) const { return detail::eval_node(*root_, x); }

  const std::string& variable() const noexcept { return var_; }
  const std::string& source() const noexcept { return source_; }
  const Node& root() const noexcept { return *root_; }

  /// Canonical text with minimal parentheses; parse(print(e)) == e.
  std::string print() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  friend bool operator==(const Expression& x, const Expression& y) {
    return x.var_ == y.var_ && detail::nodes_equal(*x.root_, *y.root_);
  }

  friend Expression parse(std::string_view text, std::string_view varname);

private:
  std::shared_ptr<const Node> root_;
  std::string var_;
  std::string source_;
};

inline Expression parse(std::string_view text, std::string_view varname) {
  if (varname.empty() || varname == "pi" || varname == "e" || function_from_name(varname)) {
    throw SpecError("invalid variable name '" + std::string(varname) + "'");
  }
  Expression e;
  e.root_ = detail::Parser(text, varname).parse();
  e.var_ = std::string(varname);
  e.source_ = std::string(text);
  return e;
}

/// Outcome of a sampled sign check. Sampling verdicts are not proofs.
struct SignVerdict {
  enum class Status { Holds, Violated, EvaluationError };

  Status status = Status::Holds;
  double x = 0.0;     // location of the first violation or error
  double value = 0.0; // value at x (Violated only)
  std::string message;
  std::size_t samples = 0;

  static constexpr std::string_view kMode = "sampled, not proven";

  bool holds() const noexcept { return status == Status::Holds; }
};

namespace detail {

template <class Pred>
SignVerdict check_sign_on(const Expression& e, double lo, double hi, std::size_t n,
                          Pred ok) {
  if (!(lo < hi) || n < 2) {
    throw ArgumentError("sign check needs lo < hi and n >= 2");
  }
  SignVerdict v;
  v.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                                static_cast<double>(n - 1);
    try {
      const double fx = e.evaluate(x);
      if (!ok(fx)) {
        v.status = SignVerdict::Status::Violated;
        v.x = x;
        v.value = fx;
        return v;
      }
    } catch (const DomainError& err) {
      v.status = SignVerdict::Status::EvaluationError;
      v.x = x;
      v.message = err.what();
      return v;
    }
  }
  return v;
}

} // namespace detail

/// Samples n equispaced points of [lo, hi] and checks e > 0 at each.
inline SignVerdict check_positive_on(const Expression& e, double lo, double hi,
                                     std::size_t n) {
  return detail::check_sign_on(e, lo, hi, n, [](double v) { return v > 0.0; });
}

/// As check_positive_on, for e >= 0.
inline SignVerdict check_nonnegative_on(const Expression& e, double lo, double hi,
                                        std::size_t n) {
  return detail::check_sign_on(e, lo, hi, n, [](double v) { return v >= 0.0; });
}

} // namespace fraclyap
