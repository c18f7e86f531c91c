#include "potform/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include <fmt/format.h>

namespace potform {

struct Expression::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
  double number = 0.0;
  int var = 0;  // 0..2 coordinates, 3 = r, 4 = theta
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(const Point& x) const {
    switch (kind) {
      case Kind::Number:
        return number;
      case Kind::Var:
        if (var < 3) return x[var];
        if (var == 3) return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return std::atan2(x[1], x[0]);
      case Kind::Neg:
        return -lhs->eval(x);
      case Kind::Add:
        return lhs->eval(x) + rhs->eval(x);
      case Kind::Sub:
        return lhs->eval(x) - rhs->eval(x);
      case Kind::Mul:
        return lhs->eval(x) * rhs->eval(x);
      case Kind::Div:
        return lhs->eval(x) / rhs->eval(x);
      case Kind::Pow:
        return std::pow(lhs->eval(x), rhs->eval(x));
      case Kind::Call:
        return fn(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

double fn_abs(double v) { return std::abs(v); }
double fn_sin(double v) { return std::sin(v); }
double fn_cos(double v) { return std::cos(v); }
double fn_tan(double v) { return std::tan(v); }
double fn_exp(double v) { return std::exp(v); }
double fn_log(double v) { return std::log(v); }
double fn_sqrt(double v) { return std::sqrt(v); }

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError(fmt::format("expression '{}': {} at position {}", s_, what, pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (accept('+')) {
        e = make(Kind::Add, e, term());
      } else if (accept('-')) {
        e = make(Kind::Sub, e, term());
      } else {
        return e;
      }
    }
  }

  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (accept('*')) {
        e = make(Kind::Mul, e, unary());
      } else if (accept('/')) {
        e = make(Kind::Div, e, unary());
      } else {
        return e;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      return named(name);
    }
    fail("unexpected character");
  }

  NodePtr named(const std::string& name) {
    static const std::vector<std::pair<std::string, double (*)(double)>> functions{
        {"sin", fn_sin}, {"cos", fn_cos}, {"tan", fn_tan},   {"exp", fn_exp},
        {"log", fn_log}, {"sqrt", fn_sqrt}, {"abs", fn_abs}};
    for (const auto& [fname, fn] : functions) {
      if (name != fname) continue;
      if (!accept('(')) fail(fmt::format("expected '(' after {}", name));
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Call;
      n->fn = fn;
      n->lhs = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    auto n = std::make_shared<Expression::Node>();
    if (name == "pi") {
      n->kind = Kind::Number;
      n->number = std::numbers::pi;
      return n;
    }
    n->kind = Kind::Var;
    if (name == "x1" || name == "x") {
      n->var = 0;
    } else if (name == "x2" || name == "y") {
      n->var = 1;
    } else if (name == "x3" || name == "z") {
      n->var = 2;
    } else if (name == "r") {
      n->var = 3;
    } else if (name == "theta") {
      n->var = 4;
    } else {
      fail(fmt::format("unknown name '{}'", name));
    }
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::operator()(const Point& x) const { return root_->eval(x); }

}  // namespace potform
