#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lvh {

/// Evaluation point; y is ignored by 1-d expressions.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, std::string expected, std::string found);
  std::size_t offset;
  std::string expected;
  std::string found;
};

class UnknownIdentifier : public std::runtime_error {
 public:
  UnknownIdentifier(std::size_t offset, std::string name);
  std::size_t offset;
  std::string name;
};

class WrongDimension : public std::runtime_error {
 public:
  WrongDimension(std::size_t offset, std::string name, int dimension);
  std::size_t offset;
  std::string name;
  int dimension;
};

class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, Point at);
  Point at;
};

/// Arithmetic expression over x (and y in 2-d) with +,-,*,/,^, unary minus,
/// the functions sin, cos, exp, abs, tanh, min, max, and constants pi, e.
class Expr {
 public:
  /// Evaluate at a point; throws DomainError instead of returning NaN or inf.
  double eval(const Point& p) const;
  /// Fully parenthesized source form; reparsing it evaluates identically.
  std::string to_string() const;
  int dimension() const { return dim_; }

 private:
  friend class Parser;
  enum class Op : std::uint8_t {
    literal, var_x, var_y, add, sub, mul, div, pow, neg,
    fn_sin, fn_cos, fn_exp, fn_abs, fn_tanh, fn_min, fn_max,
  };
  struct Node {
    Op op = Op::literal;
    double value = 0.0;
    int a = -1;
    int b = -1;
  };
  std::vector<Node> nodes_;
  int root_ = -1;
  int dim_ = 1;

  double eval_node(int idx, const Point& p) const;
  void print_node(int idx, std::string& out) const;
};

/// Expression plus the source it was parsed from.
struct Profile {
  std::string source;
  Expr expr;
};

/// Parse `text` over a `dimension`-dimensional domain (1 or 2).
Profile parse(std::string_view text, int dimension);

double eval(const Profile& p, const Point& at);

}  // namespace lvh
