#pragma once

// Arithmetic expressions over variables x1..xn with exact reverse-mode
// gradients. Used for the smooth part of problem objectives.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace smil {

/// Raised by parse() on malformed input. position() is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + what),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised by evaluation for log of a non-positive argument or division by zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class NodeKind : std::uint8_t { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Log };

struct ExprNode {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;  // Constant
  int index = 0;       // Variable (1-based) or Pow exponent
  int lhs = -1;
  int rhs = -1;
};

/// Immutable expression tree stored as an arena in topological order
/// (children precede parents, root is last).
class Expression {
 public:
  Expression() : nodes_(std::make_shared<const std::vector<ExprNode>>(std::vector<ExprNode>{ExprNode{}})) {}
  explicit Expression(std::vector<ExprNode> nodes)
      : nodes_(std::make_shared<const std::vector<ExprNode>>(std::move(nodes))) {
    if (nodes_->empty()) throw std::invalid_argument("empty expression");
  }

  const std::vector<ExprNode>& nodes() const { return *nodes_; }
  int root() const { return static_cast<int>(nodes_->size()) - 1; }

  /// Largest variable index referenced, 0 if none.
  int max_variable() const {
    int m = 0;
    for (const auto& n : *nodes_)
      if (n.kind == NodeKind::Variable && n.index > m) m = n.index;
    return m;
  }

  /// 1-based indices of referenced variables, sorted and unique.
  std::vector<int> variables() const {
    std::vector<bool> seen(static_cast<std::size_t>(max_variable()) + 1, false);
    for (const auto& n : *nodes_)
      if (n.kind == NodeKind::Variable) seen[static_cast<std::size_t>(n.index)] = true;
    std::vector<int> out;
    for (std::size_t i = 1; i < seen.size(); ++i)
      if (seen[i]) out.push_back(static_cast<int>(i));
    return out;
  }

 private:
  std::shared_ptr<const std::vector<ExprNode>> nodes_;
};

namespace detail {

inline double ipow(double base, int e) {
  double result = 1.0;
  double b = base;
  unsigned u = static_cast<unsigned>(e);
  while (u) {
    if (u & 1U) result *= b;
    b *= b;
    u >>= 1U;
  }
  return result;
}

inline void forward_values(const Expression& expr, std::span<const double> point, std::vector<double>& val) {
  const auto& nodes = expr.nodes();
  if (static_cast<std::size_t>(expr.max_variable()) > point.size())
    throw std::invalid_argument("point dimension " + std::to_string(point.size()) +
                                " smaller than variable index " + std::to_string(expr.max_variable()));
  val.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ExprNode& n = nodes[i];
    const auto L = [&] { return val[static_cast<std::size_t>(n.lhs)]; };
    const auto R = [&] { return val[static_cast<std::size_t>(n.rhs)]; };
    switch (n.kind) {
      case NodeKind::Constant: val[i] = n.value; break;
      case NodeKind::Variable: val[i] = point[static_cast<std::size_t>(n.index - 1)]; break;
      case NodeKind::Add: val[i] = L() + R(); break;
      case NodeKind::Sub: val[i] = L() - R(); break;
      case NodeKind::Mul: val[i] = L() * R(); break;
      case NodeKind::Div:
        if (R() == 0.0) throw DomainError("division by zero");
        val[i] = L() / R();
        break;
      case NodeKind::Neg: val[i] = -L(); break;
      case NodeKind::Pow: val[i] = ipow(L(), n.index); break;
      case NodeKind::Exp: val[i] = std::exp(L()); break;
      case NodeKind::Log:
        if (!(L() > 0.0)) throw DomainError("log of non-positive argument");
        val[i] = std::log(L());
        break;
    }
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression");
    parse_sum();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') fail("unbalanced ')'");
      fail(std::string("unexpected '") + text_[pos_] + "'");
    }
    return Expression(std::move(nodes_));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_ + 1, what); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  int push(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) return lhs;
      const char c = text_[pos_];
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      const int rhs = parse_product();
      lhs = push({c == '+' ? NodeKind::Add : NodeKind::Sub, 0.0, 0, lhs, rhs});
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) return lhs;
      const char c = text_[pos_];
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      const int rhs = parse_unary();
      lhs = push({c == '*' ? NodeKind::Mul : NodeKind::Div, 0.0, 0, lhs, rhs});
    }
  }

  int parse_unary() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
      const int operand = parse_unary();
      return push({NodeKind::Neg, 0.0, 0, operand, -1});
    }
    if (pos_ < text_.size() && text_[pos_] == '+') {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '^') return base;
    ++pos_;
    skip_ws();
    const std::size_t exponent_pos = pos_;
    const std::size_t mark = nodes_.size();
    // right-associative: the exponent itself may be a power
    const int e = parse_unary();
    const double value = constant_value(mark, e, exponent_pos);
    nodes_.resize(mark);
    if (!(value >= 0.0) || value != std::floor(value) || value > 1e6) {
      pos_ = exponent_pos;
      fail("exponent must be a non-negative integer");
    }
    return push({NodeKind::Pow, 0.0, static_cast<int>(value), base, -1});
  }

  // Folds the variable-free subtree nodes_[first..root] to a number.
  double constant_value(std::size_t first, int root, std::size_t at) {
    const auto reject = [&] {
      pos_ = at;
      fail("exponent must be a non-negative integer");
    };
    for (std::size_t i = first; i <= static_cast<std::size_t>(root); ++i)
      if (nodes_[i].kind == NodeKind::Variable) reject();
    std::vector<ExprNode> sub(nodes_.begin() + static_cast<std::ptrdiff_t>(first), nodes_.begin() + root + 1);
    for (auto& n : sub) {
      if (n.lhs >= 0) n.lhs -= static_cast<int>(first);
      if (n.rhs >= 0) n.rhs -= static_cast<int>(first);
    }
    std::vector<double> val;
    try {
      forward_values(Expression(std::move(sub)), {}, val);
    } catch (const DomainError&) {
      reject();
    }
    return val.back();
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_;
      ++pos_;
      const int inner = parse_sum();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        if (pos_ >= text_.size()) {
          pos_ = open;
          fail("unbalanced '('");
        }
        fail("expected ')'");
      }
      ++pos_;
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    if (c == ')') fail("unbalanced ')'");
    fail(std::string("unexpected '") + c + "'");
  }

  int parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        pos_ = p;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    if (literal == ".") {
      pos_ = start;
      fail("malformed number");
    }
    return push({NodeKind::Constant, std::strtod(literal.c_str(), nullptr), 0, -1, -1});
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "exp" || name == "log") {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '(' after " + std::string(name));
      const int arg = parse_primary();
      return push({name == "exp" ? NodeKind::Exp : NodeKind::Log, 0.0, 0, arg, -1});
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
      if (digits && name.size() <= 10) {
        const long index = std::strtol(std::string(name.substr(1)).c_str(), nullptr, 10);
        if (index < 1) {
          pos_ = start;
          fail("variable indices start at 1");
        }
        return push({NodeKind::Variable, 0.0, static_cast<int>(index), -1, -1});
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> nodes_;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string print_node(const std::vector<ExprNode>& nodes, int i) {
  const ExprNode& n = nodes[static_cast<std::size_t>(i)];
  switch (n.kind) {
    case NodeKind::Constant:
      return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
    case NodeKind::Variable: return "x" + std::to_string(n.index);
    case NodeKind::Add: return "(" + print_node(nodes, n.lhs) + " + " + print_node(nodes, n.rhs) + ")";
    case NodeKind::Sub: return "(" + print_node(nodes, n.lhs) + " - " + print_node(nodes, n.rhs) + ")";
    case NodeKind::Mul: return "(" + print_node(nodes, n.lhs) + " * " + print_node(nodes, n.rhs) + ")";
    case NodeKind::Div: return "(" + print_node(nodes, n.lhs) + " / " + print_node(nodes, n.rhs) + ")";
    case NodeKind::Neg: return "(-" + print_node(nodes, n.lhs) + ")";
    case NodeKind::Pow: return "(" + print_node(nodes, n.lhs) + "^" + std::to_string(n.index) + ")";
    case NodeKind::Exp: return "exp(" + print_node(nodes, n.lhs) + ")";
    case NodeKind::Log: return "log(" + print_node(nodes, n.lhs) + ")";
  }
  return {};
}

}  // namespace detail

/// Parses `text`. Grammar: sums and differences of products and quotients of
/// signed powers; primaries are decimal literals, variables x1..xn, exp(),
/// log() and parenthesized subexpressions. Exponents must fold to a
/// non-negative integer constant. Throws ParseError.
inline Expression parse(std::string_view text) { return detail::Parser(text).parse(); }

/// Fully parenthesized text that parses back to an equivalent tree.
inline std::string to_string(const Expression& expr) { return detail::print_node(expr.nodes(), expr.root()); }

inline double eval(const Expression& expr, std::span<const double> point) {
  std::vector<double> val;
  detail::forward_values(expr, point, val);
  return val.back();
}

/// Value and gradient in one sweep. `grad` is resized to point.size().
inline double eval_with_gradient(const Expression& expr, std::span<const double> point, std::vector<double>& grad) {
  std::vector<double> val;
  detail::forward_values(expr, point, val);
  const auto& nodes = expr.nodes();
  std::vector<double> adj(nodes.size(), 0.0);
  adj.back() = 1.0;
  grad.assign(point.size(), 0.0);
  for (std::size_t i = nodes.size(); i-- > 0;) {
    const double a = adj[i];
    if (a == 0.0) continue;
    const ExprNode& n = nodes[i];
    const auto l = static_cast<std::size_t>(n.lhs);
    const auto r = static_cast<std::size_t>(n.rhs);
    switch (n.kind) {
      case NodeKind::Constant: break;
      case NodeKind::Variable: grad[static_cast<std::size_t>(n.index - 1)] += a; break;
      case NodeKind::Add: adj[l] += a; adj[r] += a; break;
      case NodeKind::Sub: adj[l] += a; adj[r] -= a; break;
      case NodeKind::Mul: adj[l] += a * val[r]; adj[r] += a * val[l]; break;
      case NodeKind::Div:
        adj[l] += a / val[r];
        adj[r] -= a * val[l] / (val[r] * val[r]);
        break;
      case NodeKind::Neg: adj[l] -= a; break;
      case NodeKind::Pow:
        if (n.index > 0) adj[l] += a * n.index * detail::ipow(val[l], n.index - 1);
        break;
      case NodeKind::Exp: adj[l] += a * val[i]; break;
      case NodeKind::Log: adj[l] += a / val[l]; break;
    }
  }
  return val.back();
}

inline std::vector<double> gradient(const Expression& expr, std::span<const double> point) {
  std::vector<double> grad;
  eval_with_gradient(expr, point, grad);
  return grad;
}

}  // namespace smil
