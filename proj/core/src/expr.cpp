#include "lvhybrid/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace lvh {

namespace {

std::string describe_char(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return "end of input";
  return "'" + std::string(1, text[pos]) + "'";
}

std::string format_point(const Point& p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.17g, %.17g)", p.x, p.y);
  return buf;
}

std::string format_literal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset_, std::string expected_, std::string found_)
    : std::runtime_error("syntax error at offset " + std::to_string(offset_) +
                         ": expected " + expected_ + ", found " + found_),
      offset(offset_), expected(std::move(expected_)), found(std::move(found_)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t offset_, std::string name_)
    : std::runtime_error("unknown identifier '" + name_ + "' at offset " +
                         std::to_string(offset_)),
      offset(offset_), name(std::move(name_)) {}

WrongDimension::WrongDimension(std::size_t offset_, std::string name_, int dimension_)
    : std::runtime_error("'" + name_ + "' is not available in " +
                         std::to_string(dimension_) + "-d expressions (offset " +
                         std::to_string(offset_) + ")"),
      offset(offset_), name(std::move(name_)), dimension(dimension_) {}

DomainError::DomainError(const std::string& what_, Point at_)
    : std::runtime_error(what_ + " at " + format_point(at_)), at(at_) {}

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    Expr e;
    e.dim_ = dim_;
    nodes_ = &e.nodes_;
    e.root_ = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw SyntaxError(pos_, "end of input", describe_char(text_, pos_));
    return e;
  }

 private:
  using Op = Expr::Op;

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void expect(char c, const char* what) {
    skip_ws();
    if (peek() != c) throw SyntaxError(pos_, what, describe_char(text_, pos_));
    ++pos_;
  }
  int make(Op op, int a = -1, int b = -1, double value = 0.0) {
    nodes_->push_back({op, value, a, b});
    return static_cast<int>(nodes_->size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '+') { ++pos_; lhs = make(Op::add, lhs, parse_term()); }
      else if (c == '-') { ++pos_; lhs = make(Op::sub, lhs, parse_term()); }
      else return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '*') { ++pos_; lhs = make(Op::mul, lhs, parse_factor()); }
      else if (c == '/') { ++pos_; lhs = make(Op::div, lhs, parse_factor()); }
      else return lhs;
    }
  }

  // Unary minus binds looser than '^': -x^2 parses as -(x^2).
  int parse_factor() {
    skip_ws();
    if (peek() == '-') { ++pos_; return make(Op::neg, parse_factor()); }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    skip_ws();
    if (peek() == '^') { ++pos_; return make(Op::pow, base, parse_factor()); }
    return base;
  }

  int parse_primary() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      int e = parse_expr();
      expect(')', "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError(pos_, "a number, name, or '('", describe_char(text_, pos_));
  }

  int parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
      throw SyntaxError(start, "a number", describe_char(text_, start));
    if (peek() == 'e' || peek() == 'E') {
      std::size_t mark = pos_ + 1;
      if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-')) ++mark;
      if (mark < text_.size() && std::isdigit(static_cast<unsigned char>(text_[mark]))) {
        pos_ = mark;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || !std::isfinite(value))
      throw SyntaxError(start, "a finite number",
                        std::string(text_.substr(start, pos_ - start)));
    return make(Op::literal, -1, -1, value);
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    if (name == "x") return make(Op::var_x);
    if (name == "y") {
      if (dim_ < 2) throw WrongDimension(start, name, dim_);
      return make(Op::var_y);
    }
    if (name == "pi") return make(Op::literal, -1, -1, std::numbers::pi);
    if (name == "e") return make(Op::literal, -1, -1, std::numbers::e);

    struct Fn { const char* name; int arity; Op op; };
    static constexpr Fn fns[] = {
        {"sin", 1, Op::fn_sin}, {"cos", 1, Op::fn_cos}, {"exp", 1, Op::fn_exp},
        {"abs", 1, Op::fn_abs}, {"tanh", 1, Op::fn_tanh},
        {"min", 2, Op::fn_min}, {"max", 2, Op::fn_max},
    };
    for (const auto& fn : fns) {
      if (name != fn.name) continue;
      expect('(', "'('");
      int a = parse_expr();
      int b = -1;
      if (fn.arity == 2) {
        expect(',', "','");
        b = parse_expr();
      }
      expect(')', fn.arity == 2 ? "')'" : "',' is not accepted here; expected ')'");
      return make(fn.op, a, b);
    }
    throw UnknownIdentifier(start, name);
  }
};

double Expr::eval(const Point& p) const {
  double r = eval_node(root_, p);
  if (!std::isfinite(r))
    throw DomainError("expression evaluated to a non-finite value", p);
  return r;
}

double Expr::eval_node(int idx, const Point& p) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::literal: return n.value;
    case Op::var_x: return p.x;
    case Op::var_y: return p.y;
    case Op::add: return eval_node(n.a, p) + eval_node(n.b, p);
    case Op::sub: return eval_node(n.a, p) - eval_node(n.b, p);
    case Op::mul: return eval_node(n.a, p) * eval_node(n.b, p);
    case Op::div: {
      double num = eval_node(n.a, p);
      double den = eval_node(n.b, p);
      if (den == 0.0) throw DomainError("division by zero", p);
      return num / den;
    }
    case Op::pow: {
      double base = eval_node(n.a, p);
      double expo = eval_node(n.b, p);
      double r = std::pow(base, expo);
      if (std::isnan(r)) throw DomainError("invalid power", p);
      return r;
    }
    case Op::neg: return -eval_node(n.a, p);
    case Op::fn_sin: return std::sin(eval_node(n.a, p));
    case Op::fn_cos: return std::cos(eval_node(n.a, p));
    case Op::fn_exp: return std::exp(eval_node(n.a, p));
    case Op::fn_abs: return std::fabs(eval_node(n.a, p));
    case Op::fn_tanh: return std::tanh(eval_node(n.a, p));
    case Op::fn_min: return std::fmin(eval_node(n.a, p), eval_node(n.b, p));
    case Op::fn_max: return std::fmax(eval_node(n.a, p), eval_node(n.b, p));
  }
  throw std::logic_error("corrupt expression node");
}

std::string Expr::to_string() const {
  std::string out;
  print_node(root_, out);
  return out;
}

void Expr::print_node(int idx, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  auto binary = [&](const char* op) {
    out += '(';
    print_node(n.a, out);
    out += op;
    print_node(n.b, out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print_node(n.a, out);
    if (n.b >= 0) {
      out += ", ";
      print_node(n.b, out);
    }
    out += ')';
  };
  switch (n.op) {
    case Op::literal: out += format_literal(n.value); return;
    case Op::var_x: out += 'x'; return;
    case Op::var_y: out += 'y'; return;
    case Op::add: binary(" + "); return;
    case Op::sub: binary(" - "); return;
    case Op::mul: binary(" * "); return;
    case Op::div: binary(" / "); return;
    case Op::pow: binary(" ^ "); return;
    case Op::neg:
      out += "(-";
      print_node(n.a, out);
      out += ')';
      return;
    case Op::fn_sin: fn("sin"); return;
    case Op::fn_cos: fn("cos"); return;
    case Op::fn_exp: fn("exp"); return;
    case Op::fn_abs: fn("abs"); return;
    case Op::fn_tanh: fn("tanh"); return;
    case Op::fn_min: fn("min"); return;
    case Op::fn_max: fn("max"); return;
  }
}

Profile parse(std::string_view text, int dimension) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  Parser parser(text, dimension);
  return Profile{std::string(text), parser.run()};
}

double eval(const Profile& p, const Point& at) { return p.expr.eval(at); }

}  // namespace lvh
