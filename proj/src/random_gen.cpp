#include "symgerm/random_gen.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace symgerm {

Matrix random_skew(int d, RngEngine& rng, const ToleranceConfig& tol) {
  if (d % 2 != 0) throw DimensionMismatch("random_skew: dimension must be even");
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix r(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) r(i, j) = dist(rng);
    Matrix m = r - r.transpose().eval();
    if (numerical_rank(m, tol) == d) return m;
  }
  throw NoConvergence("random_skew: could not draw a nonsingular skew matrix");
}

Subspace random_subspace(int d, int dim, RngEngine& rng, const ToleranceConfig& tol) {
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix m(d, dim);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = dist(rng);
    if (numerical_rank(m, tol) == dim) return Subspace(d, orth_basis(m, tol));
  }
  throw NoConvergence("random_subspace: could not draw an independent basis");
}

Matrix random_symplectic(const Matrix& mu, RngEngine& rng, double scale) {
  const int d = static_cast<int>(mu.rows());
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix s(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) s(i, j) = s(j, i) = dist(rng);
  // mu * x symmetric makes x infinitesimally symplectic, so exp(x)
  // preserves mu exactly.
  Matrix x = mu.partialPivLu().solve(s);
  return x.exp();
}

LinearTuple random_generic_tuple(int n, const Dims& dims, RngEngine& rng,
                                 const ToleranceConfig& tol) {
  const int d = 2 * n;
  const int s = invariant_count(dims, n);
  for (int attempt = 0; attempt < 500; ++attempt) {
    LinearTuple lt;
    lt.ambient_dim = d;
    lt.mu = random_skew(d, rng, tol);
    lt.u1 = random_subspace(d, dims.k1, rng, tol);
    lt.u2 = random_subspace(d, dims.k2, rng, tol);
    GenericityReport rep = check_genericity_linear(lt, dims, tol);
    if (!rep.all_hold({"G1", "G2", "G3", "G4", "G5", "G8"})) continue;
    if (s > 0) {
      try {
        CharNumbers cn = characteristic_numbers(reduce(lt, dims, tol), tol);
        if (s >= 2 && cn.distinct != s) continue;  // G6
      } catch (const Error&) {
        continue;
      }
    }
    return lt;
  }
  throw NoConvergence("random_generic_tuple: genericity conditions kept failing");
}

}  // namespace symgerm
