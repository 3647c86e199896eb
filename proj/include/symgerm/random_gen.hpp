#pragma once

#include <random>

#include "symgerm/invariants.hpp"

namespace symgerm {

using RngEngine = std::mt19937_64;

/// Nonsingular skew-symmetric d x d matrix (d even) with entries of order 1.
Matrix random_skew(int d, RngEngine& rng, const ToleranceConfig& tol);

/// Random dimension-dim subspace of R^d with orthonormal basis.
Subspace random_subspace(int d, int dim, RngEngine& rng, const ToleranceConfig& tol);

/// Linear map preserving the given nonsingular skew form, built as the
/// exponential of a random infinitesimally symplectic matrix.
Matrix random_symplectic(const Matrix& mu, RngEngine& rng, double scale = 0.3);

/// Random tuple with the requested dimensions satisfying the applicable
/// genericity conditions; resamples until they hold. Throws NoConvergence
/// after too many attempts.
LinearTuple random_generic_tuple(int n, const Dims& dims, RngEngine& rng,
                                 const ToleranceConfig& tol);

}  // namespace symgerm
