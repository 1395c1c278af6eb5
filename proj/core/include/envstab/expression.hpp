#pragma once

// A small arithmetic-expression evaluator in one variable x, used for custom
// envelope candidates. Grammar: + - * / ^, unary minus, parentheses, numeric
// literals, the constant e, and the functions exp, log, sqrt, abs.

#include <memory>
#include <string>

namespace envstab {

class Expression {
 public:
  /// Throws InvalidArgument with the offending position on a syntax error.
  static Expression parse(const std::string& text);

  double operator()(double x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace envstab
