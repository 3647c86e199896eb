#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "symgerm/errors.hpp"
#include "symgerm/linalg.hpp"

namespace symgerm {

/// Arithmetic expression tree over numeric literals and coordinate names.
/// Operators: unary minus, + - * /, and ^ with non-negative integer
/// exponents. Deliberately no transcendental functions: every coefficient
/// the pipeline handles is polynomial or rational, which keeps symbolic
/// differentiation exact.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow };
  Kind kind;
  double value = 0.0;      // Number
  std::string name;        // Var
  ExprPtr lhs, rhs;        // binary ops; Neg and Pow use lhs only
  int exponent = 0;        // Pow
};

ExprPtr make_number(double v);
ExprPtr make_var(std::string name);
ExprPtr make_neg(ExprPtr e);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr base, int exponent);

/// Recursive-descent parse with standard precedence (^ above unary minus,
/// then * /, then + -; binary operators left-associative).
ExprPtr parse_expression(const std::string& text);

std::string to_string(const ExprPtr& e);

/// Maps coordinate names to slots of the evaluation point.
struct CoordFrame {
  std::vector<std::string> names;
  std::map<std::string, int> index;

  CoordFrame() = default;
  explicit CoordFrame(std::vector<std::string> ns);
  int slot(const std::string& name) const;  // throws EvalError on unknown name
  int size() const { return static_cast<int>(names.size()); }
};

double eval(const ExprPtr& e, const CoordFrame& frame, const Vector& point);

/// Exact partial derivative with respect to one coordinate name.
ExprPtr differentiate(const ExprPtr& e, const std::string& var);

/// All coordinate names appearing in the tree.
void collect_vars(const ExprPtr& e, std::vector<std::string>& out);

bool is_constant_zero(const ExprPtr& e);

}  // namespace symgerm
