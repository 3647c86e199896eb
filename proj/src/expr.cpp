#include "symgerm/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace symgerm {

ExprPtr make_number(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Number;
  e->value = v;
  return e;
}

ExprPtr make_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr make_neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Neg;
  e->lhs = std::move(a);
  return e;
}

static ExprPtr make_binary(Expr::Kind kind, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr make_add(ExprPtr a, ExprPtr b) { return make_binary(Expr::Kind::Add, std::move(a), std::move(b)); }
ExprPtr make_sub(ExprPtr a, ExprPtr b) { return make_binary(Expr::Kind::Sub, std::move(a), std::move(b)); }
ExprPtr make_mul(ExprPtr a, ExprPtr b) { return make_binary(Expr::Kind::Mul, std::move(a), std::move(b)); }
ExprPtr make_div(ExprPtr a, ExprPtr b) { return make_binary(Expr::Kind::Div, std::move(a), std::move(b)); }

ExprPtr make_pow(ExprPtr base, int exponent) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Pow;
  e->lhs = std::move(base);
  e->exponent = exponent;
  return e;
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool accept(char c) {
    if (peek_char(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::ostringstream msg;
    msg << "parse error at offset " << pos << ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg << " or ";
      msg << expected[i];
    }
    throw ParseError(msg.str(), pos, std::move(expected));
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = make_add(e, parse_term());
      else if (accept('-'))
        e = make_sub(e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (accept('*'))
        e = make_mul(e, parse_factor());
      else if (accept('/'))
        e = make_div(e, parse_factor());
      else
        return e;
    }
  }

  ExprPtr parse_factor() {
    if (accept('-')) return make_neg(parse_factor());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == start) fail({"non-negative integer exponent"});
      return make_pow(base, std::atoi(text.substr(start, pos - start).c_str()));
    }
    return base;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail({"number", "identifier", "'('"});
    char c = text[pos];
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_sum();
      if (!accept(')')) fail({"')'"});
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail({"number", "identifier", "'('"});
  }

  ExprPtr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // "2e" is the number 2 followed by identifier e
      }
    }
    return make_number(std::strtod(text.substr(start, pos - start).c_str(), nullptr));
  }

  ExprPtr parse_ident() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return make_var(text.substr(start, pos - start));
  }
};

}  // namespace

ExprPtr parse_expression(const std::string& text) {
  Parser p(text);
  ExprPtr e = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size()) p.fail({"operator", "end of input"});
  return e;
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

void print(const ExprPtr& e, std::ostringstream& out, int parent_prec) {
  int prec = precedence(e->kind);
  bool paren = prec < parent_prec;
  if (paren) out << '(';
  switch (e->kind) {
    case Expr::Kind::Number: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", e->value);
      out << buf;
      break;
    }
    case Expr::Kind::Var:
      out << e->name;
      break;
    case Expr::Kind::Neg:
      out << '-';
      print(e->lhs, out, prec + 1);
      break;
    case Expr::Kind::Add:
      print(e->lhs, out, prec);
      out << " + ";
      print(e->rhs, out, prec + 1);
      break;
    case Expr::Kind::Sub:
      print(e->lhs, out, prec);
      out << " - ";
      print(e->rhs, out, prec + 1);
      break;
    case Expr::Kind::Mul:
      print(e->lhs, out, prec);
      out << "*";
      print(e->rhs, out, prec + 1);
      break;
    case Expr::Kind::Div:
      print(e->lhs, out, prec);
      out << "/";
      print(e->rhs, out, prec + 1);
      break;
    case Expr::Kind::Pow:
      print(e->lhs, out, prec + 1);
      out << "^" << e->exponent;
      break;
  }
  if (paren) out << ')';
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream out;
  print(e, out, 0);
  return out.str();
}

CoordFrame::CoordFrame(std::vector<std::string> ns) : names(std::move(ns)) {
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
}

int CoordFrame::slot(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw EvalError("unknown coordinate name: " + name);
  return it->second;
}

double eval(const ExprPtr& e, const CoordFrame& frame, const Vector& point) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return e->value;
    case Expr::Kind::Var:
      return point(frame.slot(e->name));
    case Expr::Kind::Neg:
      return -eval(e->lhs, frame, point);
    case Expr::Kind::Add:
      return eval(e->lhs, frame, point) + eval(e->rhs, frame, point);
    case Expr::Kind::Sub:
      return eval(e->lhs, frame, point) - eval(e->rhs, frame, point);
    case Expr::Kind::Mul:
      return eval(e->lhs, frame, point) * eval(e->rhs, frame, point);
    case Expr::Kind::Div: {
      double den = eval(e->rhs, frame, point);
      if (std::abs(den) < 1e-150) throw EvalError("division by near-zero value");
      return eval(e->lhs, frame, point) / den;
    }
    case Expr::Kind::Pow:
      return std::pow(eval(e->lhs, frame, point), e->exponent);
  }
  throw InternalError("eval: corrupt expression node");
}

ExprPtr differentiate(const ExprPtr& e, const std::string& var) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return make_number(0.0);
    case Expr::Kind::Var:
      return make_number(e->name == var ? 1.0 : 0.0);
    case Expr::Kind::Neg:
      return make_neg(differentiate(e->lhs, var));
    case Expr::Kind::Add:
      return make_add(differentiate(e->lhs, var), differentiate(e->rhs, var));
    case Expr::Kind::Sub:
      return make_sub(differentiate(e->lhs, var), differentiate(e->rhs, var));
    case Expr::Kind::Mul:
      return make_add(make_mul(differentiate(e->lhs, var), e->rhs),
                      make_mul(e->lhs, differentiate(e->rhs, var)));
    case Expr::Kind::Div:
      // (f/g)' = f'/g - f g' / g^2
      return make_sub(make_div(differentiate(e->lhs, var), e->rhs),
                      make_div(make_mul(e->lhs, differentiate(e->rhs, var)),
                               make_pow(e->rhs, 2)));
    case Expr::Kind::Pow:
      if (e->exponent == 0) return make_number(0.0);
      return make_mul(make_number(static_cast<double>(e->exponent)),
                      make_mul(make_pow(e->lhs, e->exponent - 1), differentiate(e->lhs, var)));
  }
  throw InternalError("differentiate: corrupt expression node");
}

void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
  switch (e->kind) {
    case Expr::Kind::Var:
      if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
      return;
    case Expr::Kind::Number:
      return;
    default:
      if (e->lhs) collect_vars(e->lhs, out);
      if (e->rhs) collect_vars(e->rhs, out);
  }
}

bool is_constant_zero(const ExprPtr& e) {
  return e->kind == Expr::Kind::Number && e->value == 0.0;
}

}  // namespace symgerm
