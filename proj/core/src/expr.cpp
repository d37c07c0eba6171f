#include "nlds/expr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <vector>

namespace nlds {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : Error("parse error at offset " + std::to_string(offset) + ": " + message),
      kind_(kind),
      offset_(offset),
      message_(message) {}

EvalError::EvalError(std::size_t offset, std::string subexpression, const std::string& message)
    : Error(message + " in '" + subexpression + "' at offset " + std::to_string(offset)),
      offset_(offset),
      subexpression_(std::move(subexpression)) {}

enum class Op { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Abs, Sqrt, Sin, Cos, Min, Max, Pow };

struct Expr::Node {
  Op op;
  double value = 0.0;
  Func func = Func::Exp;
  std::vector<std::shared_ptr<const Node>> args;
  std::size_t begin = 0;
  std::size_t end = 0;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FuncInfo {
  std::string_view name;
  Func func;
  std::size_t arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"exp", Func::Exp, 1},
    {"abs", Func::Abs, 1},
    {"sqrt", Func::Sqrt, 1},
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
    {"pow", Func::Pow, 2},
}};

const FuncInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

std::string_view function_name(Func func) {
  for (const auto& f : kFunctions)
    if (f.func == func) return f.name;
  return "?";
}

NodePtr make(Op op, std::size_t begin, std::size_t end, std::vector<NodePtr> args = {},
             double value = 0.0, Func func = Func::Exp) {
  auto node = std::make_shared<Expr::Node>();
  node->op = op;
  node->value = value;
  node->func = func;
  node->args = std::move(args);
  node->begin = begin;
  node->end = end;
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    auto root = sum();
    skip_space();
    if (pos_ < text_.size()) syntax("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void syntax(const std::string& message) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) syntax(std::string("expected '") + c + "'");
  }

  NodePtr sum() {
    skip_space();
    const std::size_t begin = pos_;
    auto lhs = product();
    while (true) {
      if (accept('+')) {
        auto rhs = product();
        lhs = make(Op::Add, begin, pos_, {lhs, rhs});
      } else if (accept('-')) {
        auto rhs = product();
        lhs = make(Op::Sub, begin, pos_, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  NodePtr product() {
    skip_space();
    const std::size_t begin = pos_;
    auto lhs = unary();
    while (true) {
      if (accept('*')) {
        auto rhs = unary();
        lhs = make(Op::Mul, begin, pos_, {lhs, rhs});
      } else if (accept('/')) {
        auto rhs = unary();
        lhs = make(Op::Div, begin, pos_, {lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_space();
    const std::size_t begin = pos_;
    if (accept('-')) {
      auto operand = unary();
      return make(Op::Neg, begin, pos_, {operand});
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    skip_space();
    const std::size_t begin = pos_;
    auto base = primary();
    if (accept('^')) {
      auto exponent = unary();
      return make(Op::Pow, begin, pos_, {base, exponent});
    }
    return base;
  }

  NodePtr primary() {
    skip_space();
    const std::size_t begin = pos_;
    if (pos_ >= text_.size()) syntax("expected operand");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      auto inner = sum();
      expect(')');
      return inner;
    }
    (void)begin;
    syntax("expected operand");
  }

  NodePtr number() {
    const std::size_t begin = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        while (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end])))
          ++exp_end;
        end = exp_end;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + begin, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) syntax("malformed number");
    pos_ = end;
    return make(Op::Number, begin, end, {}, value);
  }

  NodePtr identifier() {
    const std::size_t begin = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(begin, pos_ - begin);

    if (name == "x") return make(Op::VarX, begin, pos_);
    if (name == "y") return make(Op::VarY, begin, pos_);
    if (name == "pi") return make(Op::Number, begin, pos_, {}, std::numbers::pi);
    if (name == "e") return make(Op::Number, begin, pos_, {}, std::numbers::e);

    const FuncInfo* info = find_function(name);
    if (info == nullptr) {
      throw ParseError(ParseError::Kind::UnknownIdentifier, begin,
                       "unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    std::vector<NodePtr> args;
    if (!accept(')')) {
      do {
        args.push_back(sum());
      } while (accept(','));
      expect(')');
    }
    if (args.size() != info->arity) {
      std::ostringstream msg;
      msg << "function '" << name << "' expects " << info->arity << " argument(s), got "
          << args.size();
      throw ParseError(ParseError::Kind::Arity, begin, msg.str());
    }
    return make(Op::Call, begin, pos_, std::move(args), 0.0, info->func);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct Evaluator {
  const std::string& text;
  double x;
  std::optional<double> y;

  [[noreturn]] void fail(const Expr::Node& node, const std::string& message) const {
    std::string sub;
    if (node.end <= text.size() && node.begin < node.end) sub = text.substr(node.begin, node.end - node.begin);
    throw EvalError(node.begin, sub, message);
  }

  double power(const Expr::Node& node, double base, double exponent) const {
    if (base < 0.0 && std::trunc(exponent) != exponent)
      fail(node, "negative base raised to a non-integer power");
    if (base == 0.0 && exponent < 0.0) fail(node, "zero raised to a negative power");
    return std::pow(base, exponent);
  }

  double operator()(const Expr::Node& node) const {
    switch (node.op) {
      case Op::Number:
        return node.value;
      case Op::VarX:
        return x;
      case Op::VarY:
        if (!y) fail(node, "unbound variable y");
        return *y;
      case Op::Neg:
        return -(*this)(*node.args[0]);
      case Op::Add:
        return (*this)(*node.args[0]) + (*this)(*node.args[1]);
      case Op::Sub:
        return (*this)(*node.args[0]) - (*this)(*node.args[1]);
      case Op::Mul:
        return (*this)(*node.args[0]) * (*this)(*node.args[1]);
      case Op::Div: {
        const double num = (*this)(*node.args[0]);
        const double den = (*this)(*node.args[1]);
        if (den == 0.0) fail(node, "division by zero");
        return num / den;
      }
      case Op::Pow:
        return power(node, (*this)(*node.args[0]), (*this)(*node.args[1]));
      case Op::Call: {
        const double a = (*this)(*node.args[0]);
        switch (node.func) {
          case Func::Exp:
            return std::exp(a);
          case Func::Abs:
            return std::abs(a);
          case Func::Sqrt:
            if (a < 0.0) fail(node, "square root of a negative number");
            return std::sqrt(a);
          case Func::Sin:
            return std::sin(a);
          case Func::Cos:
            return std::cos(a);
          case Func::Min:
            return std::min(a, (*this)(*node.args[1]));
          case Func::Max:
            return std::max(a, (*this)(*node.args[1]));
          case Func::Pow:
            return power(node, a, (*this)(*node.args[1]));
        }
      }
    }
    fail(node, "corrupt expression node");
  }
};

bool uses(const Expr::Node& node, Op var) {
  if (node.op == var) return true;
  for (const auto& arg : node.args)
    if (uses(*arg, var)) return true;
  return false;
}

void print_node(const Expr::Node& node, std::string& out) {
  switch (node.op) {
    case Op::Number: {
      std::array<char, 32> buf{};
      std::snprintf(buf.data(), buf.size(), "%.17g", node.value);
      out += buf.data();
      return;
    }
    case Op::VarX:
      out += 'x';
      return;
    case Op::VarY:
      out += 'y';
      return;
    case Op::Neg:
      out += "(-";
      print_node(*node.args[0], out);
      out += ')';
      return;
    case Op::Call: {
      out += function_name(node.func);
      out += '(';
      for (std::size_t k = 0; k < node.args.size(); ++k) {
        if (k > 0) out += ", ";
        print_node(*node.args[k], out);
      }
      out += ')';
      return;
    }
    default:
      break;
  }
  const char* symbol = node.op == Op::Add   ? " + "
                       : node.op == Op::Sub ? " - "
                       : node.op == Op::Mul ? " * "
                       : node.op == Op::Div ? " / "
                                            : " ^ ";
  out += '(';
  print_node(*node.args[0], out);
  out += symbol;
  print_node(*node.args[1], out);
  out += ')';
}

bool same_tree(const Expr::Node& a, const Expr::Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  if (a.op == Op::Number && std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value))
    return false;
  if (a.op == Op::Call && a.func != b.func) return false;
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!same_tree(*a.args[k], *b.args[k])) return false;
  return true;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expr Expr::parse(std::string_view text) {
  Parser parser(text);
  return Expr(parser.parse(), std::string(text));
}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw DomainError("Expr::constant needs a finite value");
  NodePtr node = make(Op::Number, 0, 0, {}, std::abs(value));
  if (std::signbit(value)) node = make(Op::Neg, 0, 0, {node});
  std::string text;
  print_node(*node, text);
  return Expr(std::move(node), std::move(text));
}

double Expr::eval(double x) const { return eval(x, std::nullopt); }

double Expr::eval(double x, double y) const { return eval(x, std::optional<double>(y)); }

double Expr::eval(double x, std::optional<double> y) const {
  return Evaluator{text_, x, y}(*root_);
}

bool Expr::uses_x() const noexcept { return uses(*root_, Op::VarX); }

bool Expr::uses_y() const noexcept { return uses(*root_, Op::VarY); }

std::string Expr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

bool equivalent(const Expr& lhs, const Expr& rhs) { return same_tree(*lhs.root_, *rhs.root_); }

}  // namespace nlds
