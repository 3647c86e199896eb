#include "symgerm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace symgerm {

int numerical_rank(const Matrix& m, const ToleranceConfig& tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol.rank_tol * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

Matrix orth_basis(const Matrix& m, const ToleranceConfig& tol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return Matrix(m.rows(), 0);
  const double cutoff = tol.rank_tol * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix null_basis(const Matrix& m, const ToleranceConfig& tol) {
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  if (m.cols() == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = tol.rank_tol * top;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

Subspace skew_complement(const Subspace& u, const Matrix& omega, const ToleranceConfig& tol) {
  const int d = u.ambient_dim;
  if (omega.rows() != d || omega.cols() != d)
    throw DimensionMismatch("skew_complement: form size does not match ambient dimension");
  if (numerical_rank(omega, tol) != d)
    throw SingularForm("skew_complement: form is singular on the ambient space");
  // omega(v, u_j) = v^t Omega u_j = 0 for all j  <=>  (Omega U)^t v = 0.
  Matrix constraints = (omega * u.basis).transpose();
  return Subspace(d, null_basis(constraints, tol));
}

Subspace subspace_sum(const Subspace& u, const Subspace& v, const ToleranceConfig& tol) {
  if (u.ambient_dim != v.ambient_dim)
    throw DimensionMismatch("subspace_sum: ambient dimensions differ");
  Matrix joint(u.ambient_dim, u.dim() + v.dim());
  joint << u.basis, v.basis;
  return Subspace(u.ambient_dim, orth_basis(joint, tol));
}

Subspace subspace_intersect(const Subspace& u, const Subspace& v, const ToleranceConfig& tol) {
  if (u.ambient_dim != v.ambient_dim)
    throw DimensionMismatch("subspace_intersect: ambient dimensions differ");
  if (u.dim() == 0 || v.dim() == 0) return Subspace(u.ambient_dim, Matrix(u.ambient_dim, 0));
  // Null vectors (a; b) of [U, -V] give common points Ua = Vb.
  Matrix joint(u.ambient_dim, u.dim() + v.dim());
  joint << u.basis, -v.basis;
  Matrix ns = null_basis(joint, tol);
  Matrix inter = u.basis * ns.topRows(u.dim());
  return Subspace(u.ambient_dim, orth_basis(inter, tol));
}

bool subspace_contains(const Subspace& big, const Subspace& small, const ToleranceConfig& tol) {
  if (big.ambient_dim != small.ambient_dim) return false;
  Matrix joint(big.ambient_dim, big.dim() + small.dim());
  joint << big.basis, small.basis;
  return numerical_rank(joint, tol) == numerical_rank(big.basis, tol);
}

bool subspace_equal(const Subspace& u, const Subspace& v, const ToleranceConfig& tol) {
  return u.dim() == v.dim() && subspace_contains(u, v, tol) && subspace_contains(v, u, tol);
}

Matrix restricted_gram(const Matrix& omega, const Subspace& u) {
  Matrix g = u.basis.transpose() * omega * u.basis;
  return 0.5 * (g - g.transpose().eval());
}

ComplexMultiset conjugate_symmetrize(const ComplexMultiset& values) {
  const std::size_t m = values.size();
  ComplexMultiset out;
  out.reserve(m);
  std::vector<bool> used(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (used[i]) continue;
    used[i] = true;
    // Nearest conjugate candidate, possibly the value itself.
    std::size_t best = i;
    double best_dist = std::abs(std::conj(values[i]) - values[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      if (used[j]) continue;
      double d = std::abs(std::conj(values[i]) - values[j]);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == i) {
      out.push_back(Complex(values[i].real(), 0.0));
    } else {
      used[best] = true;
      Complex nu = 0.5 * (values[i] + std::conj(values[best]));
      out.push_back(nu);
      out.push_back(std::conj(nu));
    }
  }
  sort_multiset(out);
  return out;
}

ComplexMultiset eigen_multiset(const Matrix& m, const ToleranceConfig& tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eigen_multiset: matrix not square");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success)
    throw NoConvergence("eigen_multiset: eigensolver failed to converge");
  ComplexMultiset values(m.rows());
  for (int i = 0; i < m.rows(); ++i) values[i] = es.eigenvalues()(i);
  return conjugate_symmetrize(values);
}

namespace {

bool augment(std::size_t i, const std::vector<std::vector<char>>& allowed,
             std::vector<int>& match_b, std::vector<char>& visited) {
  for (std::size_t j = 0; j < match_b.size(); ++j) {
    if (!allowed[i][j] || visited[j]) continue;
    visited[j] = 1;
    if (match_b[j] < 0 ||
        augment(static_cast<std::size_t>(match_b[j]), allowed, match_b, visited)) {
      match_b[j] = static_cast<int>(i);
      return true;
    }
  }
  return false;
}

}  // namespace

bool multiset_equal(const ComplexMultiset& a, const ComplexMultiset& b, const ToleranceConfig& tol) {
  if (a.size() != b.size()) return false;
  const std::size_t m = a.size();
  if (m == 0) return true;
  std::vector<std::vector<char>> allowed(m, std::vector<char>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double radius = tol.eig_pair_tol * (1.0 + std::max(std::abs(a[i]), std::abs(b[j])));
      allowed[i][j] = std::abs(a[i] - b[j]) <= radius ? 1 : 0;
    }
  std::vector<int> match_b(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<char> visited(m, 0);
    if (!augment(i, allowed, match_b, visited)) return false;
  }
  return true;
}

Matrix coords_in_basis(const Matrix& basis, const Matrix& vectors, const ToleranceConfig& tol) {
  if (basis.cols() == 0) {
    if (vectors.norm() > tol.rank_tol * (1.0 + vectors.norm()))
      throw InternalError("coords_in_basis: nonzero vectors against empty basis");
    return Matrix(0, vectors.cols());
  }
  Matrix x = basis.colPivHouseholderQr().solve(vectors);
  double scale = std::max(1.0, vectors.norm());
  if ((basis * x - vectors).norm() > 1e3 * tol.rank_tol * scale)
    throw InternalError("coords_in_basis: vectors not contained in the span");
  return x;
}

int distinct_count(const ComplexMultiset& values, const ToleranceConfig& tol) {
  const std::size_t m = values.size();
  if (m == 0) return 0;
  // Single-linkage: union components joined by an edge within the radius.
  std::vector<std::size_t> parent(m);
  for (std::size_t i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      double radius =
          tol.eig_distinct_tol * (1.0 + std::max(std::abs(values[i]), std::abs(values[j])));
      if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);
    }
  int clusters = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (find(i) == i) ++clusters;
  return clusters;
}

void sort_multiset(ComplexMultiset& values) {
  std::sort(values.begin(), values.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace symgerm
