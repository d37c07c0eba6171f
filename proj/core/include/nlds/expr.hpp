#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "nlds/error.hpp"

namespace nlds {

/// Syntax, unknown-identifier, or arity error raised while parsing.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };

  ParseError(Kind kind, std::size_t offset, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  /// Byte offset into the source text.
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  Kind kind_;
  std::size_t offset_;
  std::string message_;
};

/// Unbound variable or a domain violation (sqrt of a negative, division by
/// zero, non-integer power of a negative base) during evaluation.
class EvalError : public Error {
 public:
  EvalError(std::size_t offset, std::string subexpression, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::size_t offset_;
  std::string subexpression_;
};

/// Immutable arithmetic expression in the variables x and y.
///
/// Grammar, loosest to tightest binding:
///
///     sum     := product (('+' | '-') product)*
///     product := unary (('*' | '/') unary)*
///     unary   := '-' unary | '+' unary | power
///     power   := primary ('^' unary)?          (right-associative)
///     primary := number | x | y | pi | e | func '(' sum (',' sum)* ')' | '(' sum ')'
///
/// Functions: exp, abs, sqrt, sin, cos (one argument), min, max, pow (two).
/// Copies share the tree.
class Expr {
 public:
  static Expr parse(std::string_view text);
  static Expr constant(double value);

  double eval(double x) const;
  double eval(double x, double y) const;
  double eval(double x, std::optional<double> y) const;

  bool uses_x() const noexcept;
  bool uses_y() const noexcept;

  /// Source text as given to parse (or the printed form for constants).
  const std::string& text() const noexcept { return text_; }

  /// Fully parenthesized canonical form; parse(print()) is equivalent to *this.
  std::string print() const;

  friend bool equivalent(const Expr& lhs, const Expr& rhs);

  struct Node;

 private:
  Expr(std::shared_ptr<const Node> root, std::string text);

  std::shared_ptr<const Node> root_;
  std::string text_;
};

/// Structural equality of the trees (literals compared bit-for-bit).
bool equivalent(const Expr& lhs, const Expr& rhs);

}  // namespace nlds
