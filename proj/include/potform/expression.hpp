#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "potform/geometry.hpp"

namespace potform {

class ExpressionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Small arithmetic language for user-supplied f and g.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := ('+' | '-') unary | power
 *   power   := primary ('^' unary)?
 *   primary := number | name | name '(' expr ')' | '(' expr ')'
 *
 * Names: x1 x2 x3 (also x y z), r = |x|, theta = atan2(x2, x1), pi.
 * Functions: sin cos tan exp log sqrt abs.
 */
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(const Point& x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace potform
