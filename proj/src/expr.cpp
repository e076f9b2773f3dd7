#include "bolza/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace bolza {

class ExprParser {
 public:
  ExprParser(const std::string& text, int n, int m, Expr& out)
      : text_(text), n_(n), m_(m), out_(out) {}

  void run() {
    out_.root_ = parse_ternary();
    skip_ws();
    require(pos_ == text_.size(), ErrorCode::BadInput,
            "trailing characters in expression '" + text_ + "' at offset " +
                std::to_string(pos_));
  }

 private:
  int push(Expr::Node node) {
    out_.nodes_.push_back(node);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(const char* tok) {
    skip_ws();
    size_t len = std::char_traits<char>::length(tok);
    if (text_.compare(pos_, len, tok) == 0) {
      // Avoid eating "<" out of "<=" or "=" out of "==".
      if ((len == 1 && (tok[0] == '<' || tok[0] == '>') && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') ||
          (len == 1 && tok[0] == '!' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') ||
          (len == 1 && tok[0] == '&') || (len == 1 && tok[0] == '|')) {
        if (len == 1 && (tok[0] == '&' || tok[0] == '|')) return false;
        if (len == 1 && text_[pos_ + 1] == '=') return false;
      }
      pos_ += len;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  int parse_ternary() {
    int cond = parse_or();
    if (eat("?")) {
      int a = parse_ternary();
      require(eat(":"), ErrorCode::BadInput, "expected ':' in '" + text_ + "'");
      int b = parse_ternary();
      return push({Expr::Op::Ternary, 0, 0, cond, a, b});
    }
    return cond;
  }

  int parse_or() {
    int lhs = parse_and();
    while (eat("||")) lhs = push({Expr::Op::Or, 0, 0, lhs, parse_and(), -1});
    return lhs;
  }

  int parse_and() {
    int lhs = parse_cmp();
    while (eat("&&")) lhs = push({Expr::Op::And, 0, 0, lhs, parse_cmp(), -1});
    return lhs;
  }

  int parse_cmp() {
    int lhs = parse_add();
    if (eat("<=")) return push({Expr::Op::Le, 0, 0, lhs, parse_add(), -1});
    if (eat(">=")) return push({Expr::Op::Ge, 0, 0, lhs, parse_add(), -1});
    if (eat("==")) return push({Expr::Op::Eq, 0, 0, lhs, parse_add(), -1});
    if (eat("!=")) return push({Expr::Op::Ne, 0, 0, lhs, parse_add(), -1});
    if (eat("<")) return push({Expr::Op::Lt, 0, 0, lhs, parse_add(), -1});
    if (eat(">")) return push({Expr::Op::Gt, 0, 0, lhs, parse_add(), -1});
    return lhs;
  }

  int parse_add() {
    int lhs = parse_mul();
    while (true) {
      if (eat("+")) {
        lhs = push({Expr::Op::Add, 0, 0, lhs, parse_mul(), -1});
      } else if (eat("-")) {
        lhs = push({Expr::Op::Sub, 0, 0, lhs, parse_mul(), -1});
      } else {
        return lhs;
      }
    }
  }

  int parse_mul() {
    int lhs = parse_unary();
    while (true) {
      if (eat("*")) {
        lhs = push({Expr::Op::Mul, 0, 0, lhs, parse_unary(), -1});
      } else if (eat("/")) {
        lhs = push({Expr::Op::Div, 0, 0, lhs, parse_unary(), -1});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (eat("-")) return push({Expr::Op::Neg, 0, 0, parse_unary(), -1, -1});
    if (peek() == '!' && pos_ + 1 < text_.size() && text_[pos_ + 1] != '=') {
      ++pos_;
      return push({Expr::Op::Not, 0, 0, parse_unary(), -1, -1});
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (eat("^")) {
      int expo = parse_unary();  // right-associative
      return push({Expr::Op::Pow, 0, 0, base, expo, -1});
    }
    return base;
  }

  int parse_primary() {
    skip_ws();
    require(pos_ < text_.size(), ErrorCode::BadInput,
            "unexpected end of expression '" + text_ + "'");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_ternary();
      require(eat(")"), ErrorCode::BadInput, "expected ')' in '" + text_ + "'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      double v = std::strtod(text_.c_str() + pos_, &end);
      pos_ = static_cast<size_t>(end - text_.c_str());
      return push({Expr::Op::Num, v, 0, -1, -1, -1});
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string word = text_.substr(start, pos_ - start);
      if (word == "s") {
        out_.uses_s_ = true;
        return push({Expr::Op::VarS, 0, 0, -1, -1, -1});
      }
      if (word.size() == 2 && (word[0] == 'y' || word[0] == 'u') &&
          word[1] >= '1' && word[1] <= '9') {
        int idx = word[1] - '1';
        if (word[0] == 'y') {
          require(idx < n_, ErrorCode::BadInput, "state index out of range: " + word);
          out_.uses_y_ = true;
          return push({Expr::Op::VarY, 0, idx, -1, -1, -1});
        }
        require(idx < m_, ErrorCode::BadInput, "control index out of range: " + word);
        return push({Expr::Op::VarU, 0, idx, -1, -1, -1});
      }
      if (word == "pi") return push({Expr::Op::Num, M_PI, 0, -1, -1, -1});
      return parse_call(word);
    }
    fail(ErrorCode::BadInput, "unexpected character '" + std::string(1, c) +
                                  "' in expression '" + text_ + "'");
  }

  int parse_call(const std::string& name) {
    require(eat("("), ErrorCode::BadInput, "expected '(' after " + name);
    int a = parse_ternary();
    int b = -1;
    bool two = eat(",");
    if (two) b = parse_ternary();
    require(eat(")"), ErrorCode::BadInput, "expected ')' after " + name);
    auto unary = [&](Expr::Op op) {
      require(!two, ErrorCode::BadInput, name + " takes one argument");
      return push({op, 0, 0, a, -1, -1});
    };
    auto binary = [&](Expr::Op op) {
      require(two, ErrorCode::BadInput, name + " takes two arguments");
      return push({op, 0, 0, a, b, -1});
    };
    if (name == "abs") return unary(Expr::Op::Abs);
    if (name == "sqrt") return unary(Expr::Op::Sqrt);
    if (name == "exp") return unary(Expr::Op::Exp);
    if (name == "log") return unary(Expr::Op::Log);
    if (name == "min") return binary(Expr::Op::Min);
    if (name == "max") return binary(Expr::Op::Max);
    if (name == "pow") return binary(Expr::Op::Pow);
    fail(ErrorCode::BadInput, "unknown function '" + name + "'");
  }

  const std::string& text_;
  size_t pos_ = 0;
  int n_;
  int m_;
  Expr& out_;
};

Expr Expr::parse(const std::string& text, int n, int m) {
  require(!text.empty(), ErrorCode::BadInput, "empty expression");
  require(n >= 1 && n <= 4 && m >= 1 && m <= 4, ErrorCode::BadInput,
          "descriptor dimensions must be in 1..4");
  Expr e;
  e.text_ = text;
  ExprParser(text, n, m, e).run();
  return e;
}

double Expr::eval(double s, StateView y, ControlView u) const {
  return eval_node(root_, s, y, u);
}

double Expr::eval_node(int idx, double s, StateView y, ControlView u) const {
  const Node& nd = nodes_[static_cast<size_t>(idx)];
  switch (nd.op) {
    case Op::Num: return nd.num;
    case Op::VarS: return s;
    case Op::VarY: return y[static_cast<size_t>(nd.var)];
    case Op::VarU: return u[static_cast<size_t>(nd.var)];
    case Op::Add: return eval_node(nd.a, s, y, u) + eval_node(nd.b, s, y, u);
    case Op::Sub: return eval_node(nd.a, s, y, u) - eval_node(nd.b, s, y, u);
    case Op::Mul: return eval_node(nd.a, s, y, u) * eval_node(nd.b, s, y, u);
    case Op::Div: return eval_node(nd.a, s, y, u) / eval_node(nd.b, s, y, u);
    case Op::Pow: return std::pow(eval_node(nd.a, s, y, u), eval_node(nd.b, s, y, u));
    case Op::Neg: return -eval_node(nd.a, s, y, u);
    case Op::Abs: return std::abs(eval_node(nd.a, s, y, u));
    case Op::Sqrt: return std::sqrt(eval_node(nd.a, s, y, u));
    case Op::Exp: return std::exp(eval_node(nd.a, s, y, u));
    case Op::Log: return std::log(eval_node(nd.a, s, y, u));
    case Op::Min: return std::min(eval_node(nd.a, s, y, u), eval_node(nd.b, s, y, u));
    case Op::Max: return std::max(eval_node(nd.a, s, y, u), eval_node(nd.b, s, y, u));
    case Op::Lt: return eval_node(nd.a, s, y, u) < eval_node(nd.b, s, y, u) ? 1.0 : 0.0;
    case Op::Le: return eval_node(nd.a, s, y, u) <= eval_node(nd.b, s, y, u) ? 1.0 : 0.0;
    case Op::Gt: return eval_node(nd.a, s, y, u) > eval_node(nd.b, s, y, u) ? 1.0 : 0.0;
    case Op::Ge: return eval_node(nd.a, s, y, u) >= eval_node(nd.b, s, y, u) ? 1.0 : 0.0;
    case Op::Eq: return eval_node(nd.a, s, y, u) == eval_node(nd.b, s, y, u) ? 1.0 : 0.0;
    case Op::Ne: return eval_node(nd.a, s, y, u) != eval_node(nd.b, s, y, u) ? 1.0 : 0.0;
    case Op::And: return (eval_node(nd.a, s, y, u) != 0.0 && eval_node(nd.b, s, y, u) != 0.0) ? 1.0 : 0.0;
    case Op::Or: return (eval_node(nd.a, s, y, u) != 0.0 || eval_node(nd.b, s, y, u) != 0.0) ? 1.0 : 0.0;
    case Op::Not: return eval_node(nd.a, s, y, u) == 0.0 ? 1.0 : 0.0;
    case Op::Ternary:
      return eval_node(nd.a, s, y, u) != 0.0 ? eval_node(nd.b, s, y, u)
                                             : eval_node(nd.c, s, y, u);
  }
  return 0.0;
}

}  // namespace bolza
