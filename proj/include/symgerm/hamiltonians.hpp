#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symgerm/invariants.hpp"

namespace symgerm {

struct GridSpec {
  int points_per_axis = 5;
  double radius = 0.2;
};

/// Local chart of the intersection manifold Q = S1 n S2 around the base
/// point: chart parameters live in the tangent T_p Q, ambient points are
/// recovered by Newton correction onto both strata.
class QChart {
 public:
  QChart(const GermPair& gp, const ToleranceConfig& tol);

  int dim_q() const { return static_cast<int>(tangent_.cols()); }
  const Vector& anchor() const { return anchor_; }

  struct Point {
    Vector ambient;
    std::optional<Vector> params1, params2;  // parameter preimages (parametric strata)
    double residual = 0.0;
  };

  /// Ambient point of Q at the given chart parameters. Newton residual is
  /// required below 1e-12; throws NewtonDivergence otherwise.
  Point map(const Vector& t) const;

 private:
  const GermPair* gp_;
  ToleranceConfig tol_;
  Vector anchor_;
  Matrix tangent_;  // 2n x dim_q, orthonormal basis of T_p S1 n T_p S2
};

/// Gram of the ambient form restricted to the chart tangent of Q at the
/// given chart parameters. Throws DegenerateRestriction when singular (G3
/// failure at that point), WrongRegime when k <= n.
Matrix omega_Q(const GermPair& gp, const QChart& chart, const Vector& point_params,
               const ToleranceConfig& tol);

/// Characteristic numbers sampled over a grid on Q and matched into s
/// continuous branches from the anchor outward.
struct HamiltonianField {
  int dim_q = 0;
  int s = 0;
  GridSpec grid;
  std::vector<Vector> params;                      // grid points, lexicographic order
  std::vector<std::vector<Complex>> branches;      // per grid point, s branch-ordered values
  std::vector<Complex> base_values;                // values at the anchor
  std::vector<int> excluded;                       // grid indices where genericity failed
  std::vector<int> crossing_flags;                 // grid indices with ambiguous matching
  std::vector<std::string> excluded_reasons;
};

HamiltonianField sample_hamiltonians(const GermPair& gp, const QChart& chart, const GridSpec& grid,
                                     const ToleranceConfig& tol);

struct G7Result {
  bool holds = false;
  Vector gradient;
};

/// Central-difference gradient of the single characteristic Hamiltonian at
/// the anchor. Only defined in the s = 1 regime; throws WrongRegime else.
G7Result check_G7(const HamiltonianField& field, const ToleranceConfig& tol);

std::string field_to_csv(const HamiltonianField& field);
nlohmann::json field_to_json(const HamiltonianField& field, const ToleranceConfig& tol);

}  // namespace symgerm
