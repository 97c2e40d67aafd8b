#include "delayctl/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace delayctl {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

/// Recursive-descent parser building the node list in evaluation order.
class ExpressionParser {
 public:
  ExpressionParser(Expression& out) : out_(out) {}

  void parse() {
    const int root = parse_sum();
    skip_spaces();
    if (pos_ != out_.text_.size()) {
      fail("unexpected trailing input");
    }
    (void)root;  // the root is the last node by construction
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError{"expression \"" + out_.text_ + "\": " + why +
                      " at position " + std::to_string(pos_)};
  }

  void skip_spaces() {
    while (pos_ < out_.text_.size() &&
           std::isspace(static_cast<unsigned char>(out_.text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_spaces();
    if (pos_ < out_.text_.size() && out_.text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(Expression::Node node) {
    out_.nodes_.push_back(node);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (consume('+')) {
        const int rhs = parse_product();
        lhs = push({Op::Add, 0.0, -1, lhs, rhs});
      } else if (consume('-')) {
        const int rhs = parse_product();
        lhs = push({Op::Subtract, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_factor();
    for (;;) {
      if (consume('*')) {
        const int rhs = parse_factor();
        lhs = push({Op::Multiply, 0.0, -1, lhs, rhs});
      } else if (consume('/')) {
        const int rhs = parse_factor();
        lhs = push({Op::Divide, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_factor() {
    if (consume('-')) {
      const int arg = parse_factor();
      return push({Op::Negate, 0.0, -1, arg, -1});
    }
    if (consume('+')) {
      return parse_factor();
    }
    return parse_primary();
  }

  int parse_primary() {
    skip_spaces();
    if (pos_ >= out_.text_.size()) {
      fail("expected a value");
    }
    const char c = out_.text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      if (!consume(')')) {
        fail("missing closing parenthesis");
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (ident_start(c)) {
      return parse_identifier();
    }
    fail("unexpected character");
  }

  int parse_number() {
    const char* begin = out_.text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) {
      fail("malformed number");
    }
    pos_ += static_cast<std::size_t>(end - begin);
    return push({Op::Constant, value, -1, -1, -1});
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < out_.text_.size() && ident_char(out_.text_[pos_])) {
      ++pos_;
    }
    const std::string name = out_.text_.substr(start, pos_ - start);
    skip_spaces();
    if (pos_ < out_.text_.size() && out_.text_[pos_] == '(') {
      ++pos_;
      const int arg = parse_sum();
      if (!consume(')')) {
        fail("missing closing parenthesis after " + name);
      }
      if (name == "sin") return push({Op::Sin, 0.0, -1, arg, -1});
      if (name == "cos") return push({Op::Cos, 0.0, -1, arg, -1});
      if (name == "tanh") return push({Op::Tanh, 0.0, -1, arg, -1});
      if (name == "exp") return push({Op::Exp, 0.0, -1, arg, -1});
      pos_ = start;
      fail("unknown function '" + name + "'");
    }
    const auto it = std::find(out_.variables_.begin(), out_.variables_.end(),
                              name);
    if (it == out_.variables_.end()) {
      pos_ = start;
      fail("unknown variable '" + name + "'");
    }
    const int index = static_cast<int>(it - out_.variables_.begin());
    return push({Op::Variable, 0.0, index, -1, -1});
  }

  Expression& out_;
  std::size_t pos_ = 0;
};

Expression::Expression(const std::string& text,
                       std::vector<std::string> variables)
    : text_(text), variables_(std::move(variables)) {
  ExpressionParser parser{*this};
  parser.parse();
}

double Expression::eval(const std::vector<double>& values) const {
  if (values.size() != variables_.size()) {
    throw ContractViolation{"expression expects " +
                            std::to_string(variables_.size()) +
                            " values, got " + std::to_string(values.size())};
  }
  std::vector<double> slot(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Constant:
        slot[i] = n.value;
        break;
      case Op::Variable:
        slot[i] = values[static_cast<std::size_t>(n.index)];
        break;
      case Op::Negate:
        slot[i] = -slot[static_cast<std::size_t>(n.lhs)];
        break;
      case Op::Add:
        slot[i] = slot[static_cast<std::size_t>(n.lhs)] +
                  slot[static_cast<std::size_t>(n.rhs)];
        break;
      case Op::Subtract:
        slot[i] = slot[static_cast<std::size_t>(n.lhs)] -
                  slot[static_cast<std::size_t>(n.rhs)];
        break;
      case Op::Multiply:
        slot[i] = slot[static_cast<std::size_t>(n.lhs)] *
                  slot[static_cast<std::size_t>(n.rhs)];
        break;
      case Op::Divide:
        slot[i] = slot[static_cast<std::size_t>(n.lhs)] /
                  slot[static_cast<std::size_t>(n.rhs)];
        break;
      case Op::Sin:
        slot[i] = std::sin(slot[static_cast<std::size_t>(n.lhs)]);
        break;
      case Op::Cos:
        slot[i] = std::cos(slot[static_cast<std::size_t>(n.lhs)]);
        break;
      case Op::Tanh:
        slot[i] = std::tanh(slot[static_cast<std::size_t>(n.lhs)]);
        break;
      case Op::Exp:
        slot[i] = std::exp(slot[static_cast<std::size_t>(n.lhs)]);
        break;
    }
  }
  return slot.empty() ? 0.0 : slot.back();
}

}  // namespace delayctl
