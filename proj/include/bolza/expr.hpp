#pragma once

#include <string>
#include <vector>

#include "bolza/common.hpp"

namespace bolza {

// Small arithmetic language for model descriptors. Variables: s, y1..y4,
// u1..u4. Operators: + - * / ^ (right-assoc), unary - and !, comparisons
// (< <= > >= == !=), && ||, and C-style ternaries for piecewise guards.
// Functions: abs, sqrt, exp, log, min, max, pow. Booleans are 0/1 doubles.
class Expr {
 public:
  static Expr parse(const std::string& text, int n, int m);

  double eval(double s, StateView y, ControlView u) const;
  bool eval_bool(double s, StateView y, ControlView u) const {
    return eval(s, y, u) != 0.0;
  }

  bool uses_s() const { return uses_s_; }
  bool uses_y() const { return uses_y_; }
  const std::string& text() const { return text_; }

 private:
  enum class Op : std::uint8_t {
    Num, VarS, VarY, VarU,
    Add, Sub, Mul, Div, Pow, Neg,
    Abs, Sqrt, Exp, Log, Min, Max,
    Lt, Le, Gt, Ge, Eq, Ne, And, Or, Not,
    Ternary,
  };
  struct Node {
    Op op;
    double num = 0.0;
    int var = 0;
    int a = -1, b = -1, c = -1;
  };

  double eval_node(int idx, double s, StateView y, ControlView u) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  bool uses_s_ = false;
  bool uses_y_ = false;
  std::string text_;

  friend class ExprParser;
};

}  // namespace bolza
