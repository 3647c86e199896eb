#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "symgerm/errors.hpp"

namespace symgerm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMultiset = std::vector<Complex>;

/// Numeric decision thresholds. Every rank, kernel and transversality
/// predicate in the pipeline reduces to these three knobs.
struct ToleranceConfig {
  double rank_tol = 1e-9;         // relative singular-value cutoff
  double eig_pair_tol = 1e-6;     // eigenvalue pairing radius
  double eig_distinct_tol = 1e-6; // clustering radius for distinctness counts
};

/// A linear subspace of R^d given by a basis matrix with independent columns.
/// Bases are never assumed canonical; equality means equal column span.
struct Subspace {
  int ambient_dim = 0;
  Matrix basis;  // ambient_dim x d

  Subspace() = default;
  Subspace(int ambient, Matrix b) : ambient_dim(ambient), basis(std::move(b)) {}
  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Count of singular values above rank_tol times the largest one.
int numerical_rank(const Matrix& m, const ToleranceConfig& tol);

/// Orthonormal basis of the column span of m.
Matrix orth_basis(const Matrix& m, const ToleranceConfig& tol);

/// Orthonormal basis of the (right) null space of m.
Matrix null_basis(const Matrix& m, const ToleranceConfig& tol);

/// Skew-orthogonal complement {v : omega(v,u) = 0 for all u in U} with
/// respect to a nonsingular skew form on the ambient space.
/// Throws SingularForm if omega fails the nonsingularity rank test.
Subspace skew_complement(const Subspace& u, const Matrix& omega, const ToleranceConfig& tol);

Subspace subspace_sum(const Subspace& u, const Subspace& v, const ToleranceConfig& tol);
Subspace subspace_intersect(const Subspace& u, const Subspace& v, const ToleranceConfig& tol);

bool subspace_contains(const Subspace& big, const Subspace& small, const ToleranceConfig& tol);
bool subspace_equal(const Subspace& u, const Subspace& v, const ToleranceConfig& tol);

/// Gram matrix G[i][j] = omega(b_i, b_j) of the restriction of a skew form
/// to the basis columns of u. Exactly antisymmetric by construction.
Matrix restricted_gram(const Matrix& omega, const Subspace& u);

/// All eigenvalues of a real square matrix, with multiplicity, symmetrized
/// so the multiset is exactly closed under complex conjugation. Sorted by
/// (real, imag). Throws NoConvergence if the eigensolver fails.
ComplexMultiset eigen_multiset(const Matrix& m, const ToleranceConfig& tol);

/// True iff a perfect matching exists pairing values within
/// eig_pair_tol * (1 + max(|a|,|b|)). Symmetric in its arguments.
bool multiset_equal(const ComplexMultiset& a, const ComplexMultiset& b, const ToleranceConfig& tol);

/// Coefficients X with basis * X = vectors, solved in the least-squares
/// sense; throws InternalError if the residual exceeds tolerance (vectors
/// not contained in the span).
Matrix coords_in_basis(const Matrix& basis, const Matrix& vectors, const ToleranceConfig& tol);

/// Conjugate symmetrization: pair each value with its nearest conjugate
/// candidate and replace both by (l + conj(m))/2 and its conjugate.
ComplexMultiset conjugate_symmetrize(const ComplexMultiset& values);

/// Number of single-linkage clusters with relative radius eig_distinct_tol.
int distinct_count(const ComplexMultiset& values, const ToleranceConfig& tol);

void sort_multiset(ComplexMultiset& values);

}  // namespace symgerm
