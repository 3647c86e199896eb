#pragma once

#include <map>
#include <optional>
#include <string>

#include "symgerm/germ.hpp"
#include "symgerm/linalg.hpp"

namespace symgerm {

/// Stratum dimension pair; k1 == k2 for the equal-dimension case.
struct Dims {
  int k1 = 0, k2 = 0;
  Dims() = default;
  Dims(int k) : k1(k), k2(k) {}
  Dims(int a, int b) : k1(a), k2(b) {}
  bool equal() const { return k1 == k2; }
};

/// Number of characteristic numbers for the dimension pair.
int invariant_count(const Dims& dims, int n);

/// The tangent data of a germ pair at a point: ambient space, value of the
/// form, and the two tangent spaces.
struct LinearTuple {
  int ambient_dim = 0;
  Matrix mu;        // skew nonsingular Gram of omega at the point
  Subspace u1, u2;  // tangent spaces of the strata
};

/// The tuple (W, sigma, U1 u U2) in a fixed basis of W: sigma is the Gram
/// of the form on that basis, u1/u2 hold basis columns of the subspaces in
/// W-coordinates, w_basis holds the ambient basis columns of W.
struct ReducedLinearization {
  int s = 0;
  Matrix w_basis;  // ambient_dim x 4s
  Matrix sigma;    // 4s x 4s
  Matrix u1, u2;   // 4s x 2s
};

struct ConditionResult {
  bool applicable = false;
  bool holds = false;
  int measured = 0;
  int required = 0;
  std::string note;
};

/// Per-condition outcomes; failures are reported, not thrown. Keys are
/// "G1".."G6" plus "G8" in the unequal-dimension case (displayed primed
/// there); "G7" is filled in by the Hamiltonian-field layer.
struct GenericityReport {
  bool primed = false;  // k1 < k2 naming
  std::map<std::string, ConditionResult> conditions;

  bool holds(const std::string& key) const;
  /// All applicable conditions among the listed keys hold.
  bool all_hold(const std::vector<std::string>& keys) const;
  /// Name of the first applicable failing condition among the keys, if any.
  std::optional<std::string> first_failure(const std::vector<std::string>& keys) const;
};

/// Conjugate-closed eigenvalue data of the transfer operator: the 2s raw
/// values, the s values after multiplicity-2 pairing, and the cluster count
/// used by G6.
struct CharNumbers {
  ComplexMultiset raw;        // 2s values
  ComplexMultiset collapsed;  // s values
  int distinct = 0;
};

LinearTuple linearize(const GermPair& gp, const Vector& point, const ToleranceConfig& tol);

/// Rank/dimension checks G1-G5 (plus G8 when k1 < k2) on pointwise data.
GenericityReport check_genericity_linear(const LinearTuple& lt, const Dims& dims,
                                         const ToleranceConfig& tol);

/// Full report at a point of a germ pair, including G6 when the reduction
/// and the characteristic numbers are computable.
GenericityReport check_genericity(const GermPair& gp, const Vector& point,
                                  const ToleranceConfig& tol);

/// Case-dependent reduction to (W, sigma, U1 u U2); certifies dim W = 4s,
/// sigma symplectic, U1/U2 transversal symplectic 2s-subspaces and U1^sigma
/// transversal to U2. Throws GenericityViolation naming the failed property.
ReducedLinearization reduce(const LinearTuple& lt, const Dims& dims, const ToleranceConfig& tol);

/// Transfer operators as 2s x 2s matrices in the stored bases of U1, U2.
std::pair<Matrix, Matrix> transfer_operators(const ReducedLinearization& rl,
                                             const ToleranceConfig& tol);

/// The (A, B, C) matrices of the coordinate form of sigma in the stored
/// bases: A = -1/2 Gram(sigma|U1), B = (1/2 Gram(sigma|U2))^-1, C the cross
/// Gram. Throws SingularC when C is singular at tolerance.
struct ABCMatrices {
  Matrix a, b, c;
};
ABCMatrices extract_ABC(const ReducedLinearization& rl, const ToleranceConfig& tol);

/// Spectrum of T1, computed twice (transfer operators, and 1/4 A'^-1 B
/// after C-normalization) and cross-checked. Throws RouteMismatch on
/// disagreement, UnpairedEigenvalue if multiplicity-2 pairing fails.
CharNumbers characteristic_numbers(const ReducedLinearization& rl, const ToleranceConfig& tol);

/// Nonsingular R with R^t A1 R = A2 and R^t B1 R = B2 (both tuples
/// C-normalized internally), built through the block canonical form of the
/// pencil; absent when the collapsed multisets differ. Throws
/// DegenerateSpectrum when the spectrum is not simple (fewer than s
/// clusters).
std::optional<Matrix> linear_equivalence_witness(const ReducedLinearization& rl1,
                                                 const ReducedLinearization& rl2,
                                                 const ToleranceConfig& tol);

/// Congruence transform R^t A R for both matrices of a pair.
ABCMatrices c_normalize(const ABCMatrices& abc, const ToleranceConfig& tol);

struct ModuliCount {
  bool infinite = false;
  int value = 0;
};

/// Moduli of the classification for stratum dimension k in ambient
/// dimension 2n. Throws OutOfRange unless 1 <= k <= 2n-1.
ModuliCount moduli_count(int k, int n);

}  // namespace symgerm
