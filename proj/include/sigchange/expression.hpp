#ifndef SIGCHANGE_EXPRESSION_HPP
#define SIGCHANGE_EXPRESSION_HPP

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sigchange/errors.hpp"
#include "sigchange/metric_core.hpp"
#include "sigchange/types.hpp"

// Arithmetic expressions in the chart coordinates, used by user model files.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative, binds tighter than unary minus
//   primary := number | 'pi' | 'e' | 't' | 'x' digits | func '(' expr ')' | '(' expr ')'
//   func    := exp | ln | log | sqrt | sin | cos | tan
//
// 'log' is the natural logarithm. Nothing is evaluated at parse time besides literals.

namespace sigchange {

class ExpressionError : public PreconditionError {
 public:
  ExpressionError(std::size_t position, const std::string& what)
      : PreconditionError(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class Expression {
 public:
  /// Parses `text`; coordinates x1..x{dimension-1} are accepted.
  static Expression parse(std::string_view text, int dimension) {
    Parser p{text, dimension};
    Expression out;
    out.root_ = p.parse_all();
    out.text_ = std::string(text);
    return out;
  }

  double operator()(const ChartPoint& p) const { return eval(*root_, p); }
  const std::string& text() const noexcept { return text_; }

 private:
  enum class Op { number, time, coord, neg, add, sub, mul, div, pow, exp, ln, sqrt, sin, cos, tan };

  struct Node {
    Op op = Op::number;
    double value = 0.0;
    int index = 0;
    std::shared_ptr<const Node> lhs, rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr leaf(Op op, double value = 0.0, int index = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->index = index;
    return n;
  }
  static NodePtr node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
  }

  static double eval(const Node& n, const ChartPoint& p) {
    switch (n.op) {
      case Op::number: return n.value;
      case Op::time: return p.t;
      case Op::coord:
        if (n.index > p.spatial.size()) {
          throw PreconditionError("expression refers to a coordinate beyond the chart dimension");
        }
        return p.spatial(n.index - 1);
      case Op::neg: return -eval(*n.lhs, p);
      case Op::add: return eval(*n.lhs, p) + eval(*n.rhs, p);
      case Op::sub: return eval(*n.lhs, p) - eval(*n.rhs, p);
      case Op::mul: return eval(*n.lhs, p) * eval(*n.rhs, p);
      case Op::div: return eval(*n.lhs, p) / eval(*n.rhs, p);
      case Op::pow: return std::pow(eval(*n.lhs, p), eval(*n.rhs, p));
      case Op::exp: return std::exp(eval(*n.lhs, p));
      case Op::ln: return std::log(eval(*n.lhs, p));
      case Op::sqrt: return std::sqrt(eval(*n.lhs, p));
      case Op::sin: return std::sin(eval(*n.lhs, p));
      case Op::cos: return std::cos(eval(*n.lhs, p));
      case Op::tan: return std::tan(eval(*n.lhs, p));
    }
    return std::nan("");
  }

  struct Parser {
    std::string_view s;
    int dimension;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
      std::ostringstream out;
      out << "expression '" << s << "': " << msg << " at offset " << pos;
      throw ExpressionError(pos, out.str());
    }

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr parse_all() {
      NodePtr e = expr();
      skip();
      if (pos != s.size()) fail("unexpected character");
      return e;
    }

    NodePtr expr() {
      NodePtr lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = node(Op::add, lhs, term());
        } else if (accept('-')) {
          lhs = node(Op::sub, lhs, term());
        } else {
          return lhs;
        }
      }
    }

    NodePtr term() {
      NodePtr lhs = unary();
      for (;;) {
        if (accept('*')) {
          lhs = node(Op::mul, lhs, unary());
        } else if (accept('/')) {
          lhs = node(Op::div, lhs, unary());
        } else {
          return lhs;
        }
      }
    }

    NodePtr unary() {
      if (accept('-')) return node(Op::neg, unary());
      if (accept('+')) return unary();
      return power();
    }

    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) return node(Op::pow, base, unary());
      return base;
    }

    NodePtr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (accept('(')) {
        NodePtr e = expr();
        if (!accept(')')) fail("expected ')'");
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
      fail(std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
      const std::string rest(s.substr(pos));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos += static_cast<std::size_t>(end - rest.c_str());
      return leaf(Op::number, v);
    }

    NodePtr identifier() {
      const std::size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
      const std::string_view name = s.substr(start, pos - start);
      if (name == "t") return leaf(Op::time);
      if (name == "pi") return leaf(Op::number, std::numbers::pi);
      if (name == "e") return leaf(Op::number, std::numbers::e);
      if (name.size() > 1 && name[0] == 'x' &&
          name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
        const int idx = std::atoi(std::string(name.substr(1)).c_str());
        if (idx < 1 || idx >= dimension) {
          pos = start;
          fail("coordinate '" + std::string(name) + "' outside x1..x" + std::to_string(dimension - 1));
        }
        return leaf(Op::coord, 0.0, idx);
      }
      Op op;
      if (name == "exp") {
        op = Op::exp;
      } else if (name == "ln" || name == "log") {
        op = Op::ln;
      } else if (name == "sqrt") {
        op = Op::sqrt;
      } else if (name == "sin") {
        op = Op::sin;
      } else if (name == "cos") {
        op = Op::cos;
      } else if (name == "tan") {
        op = Op::tan;
      } else {
        pos = start;
        fail("unknown name '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return node(op, arg);
    }
  };

  NodePtr root_;
  std::string text_;
};

/// Canonical model -t dt^2 + B_ij dx^i dx^j with B given entry-wise by expressions.
/// `block` is (n-1) x (n-1), row-major; the evaluator checks symmetry on every call.
inline MetricModel model_from_expressions(int n, const std::vector<std::vector<std::string>>& block) {
  if (n < 2) throw PreconditionError("model_from_expressions: dimension must be >= 2");
  const std::size_t m = static_cast<std::size_t>(n - 1);
  if (block.size() != m) throw PreconditionError("spatial_block must have dimension-1 rows");
  std::vector<Expression> exprs;
  for (const auto& row : block) {
    if (row.size() != m) throw PreconditionError("spatial_block must have dimension-1 columns");
    for (const auto& text : row) exprs.push_back(Expression::parse(text, n));
  }
  auto eval_block = [m, exprs = std::move(exprs)](const ChartPoint& p) {
    Matrix b(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) b(i, j) = exprs[i * m + j](p);
    }
    return b;
  };
  return MetricModel::canonical(n, eval_block);
}

}  // namespace sigchange

#endif  // SIGCHANGE_EXPRESSION_HPP
