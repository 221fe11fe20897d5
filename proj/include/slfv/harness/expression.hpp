#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "slfv/core/error.hpp"

namespace slfv {

/// Arithmetic expression over x, y, t with sin, cos, exp, sqrt, ^ and pi.
/// Parsed once into a small postfix program.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::string src) : src_(std::move(src)) {
    pos_ = 0;
    parse_sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
  }

  const std::string& source() const { return src_; }
  bool empty() const { return code_.empty(); }

  /// True when the expression is the literal 0.
  bool is_zero_literal() const { return code_.size() == 1 && code_[0].op == Op::Const && code_[0].value == 0.0; }

  double operator()(double x, double y, double t) const {
    double stack[64];
    int sp = 0;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Const: stack[sp++] = in.value; break;
        case Op::X: stack[sp++] = x; break;
        case Op::Y: stack[sp++] = y; break;
        case Op::T: stack[sp++] = t; break;
        case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
        case Op::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
        case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case Op::Sqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
      }
    }
    return stack[0];
  }

 private:
  enum class Op { Const, X, Y, T, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt };
  struct Instr {
    Op op;
    double value{0.0};
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "expression '" + src_ + "': " + what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, double v = 0.0) {
    code_.push_back({op, v});
    int delta = 0;
    switch (op) {
      case Op::Const: case Op::X: case Op::Y: case Op::T: delta = 1; break;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow: delta = -1; break;
      default: break;
    }
    depth_ += delta;
    if (depth_ > 64) fail("expression too deep");
  }

  void parse_sum() {
    parse_product();
    for (;;) {
      if (accept('+')) {
        parse_product();
        emit(Op::Add);
      } else if (accept('-')) {
        parse_product();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void parse_product() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        parse_unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      emit(Op::Neg);
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_power();
    }
  }

  // Right-associative; -x^2 parses as -(x^2).
  void parse_power() {
    parse_atom();
    if (accept('^')) {
      parse_unary();
      emit(Op::Pow);
    }
  }

  void parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum();
      if (!accept(')')) fail("missing ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(src_.substr(pos_), &used);
      pos_ += used;
      emit(Op::Const, v);
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");
    std::size_t end = pos_;
    while (end < src_.size() && std::isalnum(static_cast<unsigned char>(src_[end]))) ++end;
    const std::string name = src_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "x") return emit(Op::X);
    if (name == "y") return emit(Op::Y);
    if (name == "t") return emit(Op::T);
    if (name == "pi") return emit(Op::Const, std::numbers::pi);
    Op f;
    if (name == "sin") f = Op::Sin;
    else if (name == "cos") f = Op::Cos;
    else if (name == "exp") f = Op::Exp;
    else if (name == "sqrt") f = Op::Sqrt;
    else fail("unknown name '" + name + "'");
    if (!accept('(')) fail("expected '(' after " + name);
    parse_sum();
    if (!accept(')')) fail("missing ')'");
    emit(f);
  }

  std::string src_;
  std::size_t pos_{0};
  int depth_{0};
  std::vector<Instr> code_;
};

}  // namespace slfv
