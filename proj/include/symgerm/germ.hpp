#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "symgerm/expr.hpp"
#include "symgerm/linalg.hpp"

#include <json.hpp>

namespace symgerm {

/// One smooth branch of the immersed submanifold through the double point,
/// given parametrically (2n coordinate expressions in k parameters mapping
/// 0 to the base point) or implicitly (2n-k defining expressions vanishing
/// there with full-rank Jacobian).
struct StratumGerm {
  enum class Kind { Parametric, Implicit };
  Kind kind = Kind::Parametric;
  int dim = 0;                     // k
  std::vector<ExprPtr> exprs;      // 2n (parametric) or 2n-k (implicit)
  CoordFrame vars;                 // parameter names / ambient names
};

/// Validated germ-pair of strata through a common base point, with the
/// ambient 2-form given as a matrix of coefficient expressions.
struct GermPair {
  int n = 0;
  int k1 = 0, k2 = 0;  // k1 == k2 in the equal-dimension case, else k1 < k2
  CoordFrame coords;   // 2n ambient coordinate names
  Vector base_point;
  std::vector<std::vector<ExprPtr>> omega;  // 2n x 2n, skew pointwise
  std::array<StratumGerm, 2> strata;

  double closedness_residual = 0.0;
  bool closedness_warning = false;

  bool equal_dims() const { return k1 == k2; }
  int ambient_dim() const { return 2 * n; }
};

/// Evaluate the coefficient matrix of omega at an ambient point
/// (antisymmetrized to remove evaluation roundoff).
Matrix omega_at(const GermPair& gp, const Vector& point);

/// Tangent space of one stratum at an ambient point on it. For parametric
/// strata the parameter preimage is found by Gauss-Newton from the given
/// hint (zero if absent). Throws PointNotOnStratum when the point fails the
/// membership test at tolerance.
Subspace stratum_tangent(const GermPair& gp, int stratum_index, const Vector& point,
                         const ToleranceConfig& tol,
                         const std::optional<Vector>& param_hint = std::nullopt);

/// Parameter preimage of a point under a parametric stratum map.
Vector stratum_parameters(const GermPair& gp, int stratum_index, const Vector& point,
                          const ToleranceConfig& tol,
                          const std::optional<Vector>& param_hint = std::nullopt);

/// Parse and validate a germ-pair document. Checks: dimension bookkeeping,
/// skewness and nonsingularity of omega at the base point, parametric maps
/// sending 0 to the base point, implicit equations vanishing there with
/// full-rank Jacobian. A nonzero exterior derivative of omega at the base
/// point is recorded as a warning, never a hard error.
GermPair load_germ_pair(const nlohmann::json& doc, const ToleranceConfig& tol);
GermPair load_germ_pair_file(const std::string& path, const ToleranceConfig& tol);

/// Serialize back to the document format.
nlohmann::json germ_pair_to_doc(const GermPair& gp);

/// Build a germ pair with constant form and flat (linear) strata from
/// pointwise data; strata are parametric with the given basis columns as
/// directions.
GermPair germ_pair_from_linear(const Matrix& mu, const Subspace& u1, const Subspace& u2);

}  // namespace symgerm
