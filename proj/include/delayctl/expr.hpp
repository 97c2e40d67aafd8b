#pragma once

#include <string>
#include <vector>

#include "delayctl/errors.hpp"

namespace delayctl {

/// Compiled scalar arithmetic expression over named variables.
///
/// Grammar: + - * / with the usual precedence, unary +/-, parentheses,
/// decimal literals, and the unary functions sin, cos, tanh, exp.
/// Identifiers are resolved against the variable list at parse time;
/// unknown names are a ConfigError.  Evaluation is pure.
class Expression {
 public:
  Expression(const std::string& text, std::vector<std::string> variables);

  /// `values[i]` binds `variables()[i]`.
  double eval(const std::vector<double>& values) const;

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }

 private:
  enum class Op {
    Constant,
    Variable,
    Negate,
    Add,
    Subtract,
    Multiply,
    Divide,
    Sin,
    Cos,
    Tanh,
    Exp,
  };
  struct Node {
    Op op;
    double value = 0.0;  // Constant payload
    int index = -1;      // Variable payload
    int lhs = -1;
    int rhs = -1;
  };

  friend class ExpressionParser;

  std::string text_;
  std::vector<std::string> variables_;
  // Nodes are stored in evaluation order: node i only references j < i,
  // and the last node is the root.
  std::vector<Node> nodes_;
};

}  // namespace delayctl
