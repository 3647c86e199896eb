#include "symgerm/invariants.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace symgerm {

int invariant_count(const Dims& dims, int n) {
  return std::min(dims.k1 / 2, (2 * n - dims.k2) / 2);
}

bool GenericityReport::holds(const std::string& key) const {
  auto it = conditions.find(key);
  // Absent means the condition has no content for these dimensions.
  return it == conditions.end() || !it->second.applicable || it->second.holds;
}

bool GenericityReport::all_hold(const std::vector<std::string>& keys) const {
  for (const auto& k : keys)
    if (!holds(k)) return false;
  return true;
}

std::optional<std::string> GenericityReport::first_failure(
    const std::vector<std::string>& keys) const {
  for (const auto& k : keys)
    if (!holds(k)) return k + (primed && k != "G7" && k != "G8" ? "'" : "");
  return std::nullopt;
}

LinearTuple linearize(const GermPair& gp, const Vector& point, const ToleranceConfig& tol) {
  LinearTuple lt;
  lt.ambient_dim = gp.ambient_dim();
  lt.mu = omega_at(gp, point);
  if (numerical_rank(lt.mu, tol) != lt.ambient_dim)
    throw SingularForm("linearize: omega is singular at the point");
  lt.u1 = stratum_tangent(gp, 0, point, tol);
  lt.u2 = stratum_tangent(gp, 1, point, tol);
  return lt;
}

namespace {

// Kernel line of the restricted form on an odd-dimensional tangent space,
// mapped back to the ambient space. Empty when the kernel is not a line.
Subspace kernel_line(const Matrix& mu, const Subspace& u, const ToleranceConfig& tol) {
  Matrix g = restricted_gram(mu, u);
  Matrix k = null_basis(g, tol);
  return Subspace(u.ambient_dim, u.basis * k);
}

ConditionResult rank_condition(int measured, int required, std::string note = {}) {
  ConditionResult r;
  r.applicable = true;
  r.measured = measured;
  r.required = required;
  r.holds = measured == required;
  r.note = std::move(note);
  return r;
}

}  // namespace

GenericityReport check_genericity_linear(const LinearTuple& lt, const Dims& dims,
                                         const ToleranceConfig& tol) {
  GenericityReport rep;
  rep.primed = !dims.equal();
  const int d = lt.ambient_dim;
  const int k1 = dims.k1, k2 = dims.k2;
  const bool odd = k1 % 2 != 0;

  {  // G1: maximal rank of the restriction to each tangent space
    int r1 = numerical_rank(restricted_gram(lt.mu, lt.u1), tol);
    int r2 = numerical_rank(restricted_gram(lt.mu, lt.u2), tol);
    ConditionResult c;
    c.applicable = true;
    c.holds = r1 == 2 * (k1 / 2) && r2 == 2 * (k2 / 2);
    c.measured = r1 == 2 * (k1 / 2) ? r2 : r1;
    c.required = r1 == 2 * (k1 / 2) ? 2 * (k2 / 2) : 2 * (k1 / 2);
    std::ostringstream note;
    note << "rank on T S1 = " << r1 << "/" << 2 * (k1 / 2) << ", rank on T S2 = " << r2 << "/"
         << 2 * (k2 / 2);
    c.note = note.str();
    rep.conditions["G1"] = c;
  }

  Subspace sum12 = subspace_sum(lt.u1, lt.u2, tol);
  Subspace cap12 = subspace_intersect(lt.u1, lt.u2, tol);

  if (k1 + k2 <= d) {
    rep.conditions["G2"] = rank_condition(cap12.dim(), 0, "dim of tangent intersection");
    rep.conditions["G3"] =
        rank_condition(numerical_rank(restricted_gram(lt.mu, sum12), tol), k1 + k2,
                       "rank of the form on the tangent sum");
  } else {
    rep.conditions["G2"] = rank_condition(sum12.dim(), d, "dim of tangent sum");
    rep.conditions["G3"] =
        rank_condition(numerical_rank(restricted_gram(lt.mu, cap12), tol), k1 + k2 - d,
                       "rank of the form on the tangent intersection");
  }

  if (odd) {
    Subspace l1 = kernel_line(lt.mu, lt.u1, tol);
    Subspace l2 = kernel_line(lt.mu, lt.u2, tol);
    if (l1.dim() != 1 || l2.dim() != 1) {
      ConditionResult c;
      c.applicable = true;
      c.holds = false;
      c.note = "kernel of the restricted form is not a line (G1 failure upstream)";
      rep.conditions["G4"] = c;
    } else {
      Subspace plane = subspace_sum(l1, l2, tol);
      rep.conditions["G4"] = rank_condition(numerical_rank(restricted_gram(lt.mu, plane), tol), 2,
                                            "rank of the form on the kernel 2-plane");
    }
  } else {
    rep.conditions["G4"] = ConditionResult{};  // not applicable for even dimensions
  }

  Subspace comp1 = skew_complement(lt.u1, lt.mu, tol);
  rep.conditions["G5"] = rank_condition(subspace_sum(comp1, lt.u2, tol).dim(), d,
                                        "dim of (T S1)^w + T S2");

  if (!dims.equal()) {
    Subspace mixed = subspace_intersect(comp1, lt.u2, tol);
    rep.conditions["G8"] = rank_condition(numerical_rank(restricted_gram(lt.mu, mixed), tol),
                                          k2 - k1, "rank of the form on (T S1)^w n T S2");
  }
  return rep;
}

GenericityReport check_genericity(const GermPair& gp, const Vector& point,
                                  const ToleranceConfig& tol) {
  LinearTuple lt = linearize(gp, point, tol);
  Dims dims(gp.k1, gp.k2);
  GenericityReport rep = check_genericity_linear(lt, dims, tol);
  const int s = invariant_count(dims, gp.n);
  if (s == 1) {
    ConditionResult c;
    c.applicable = false;
    c.measured = c.required = 1;
    c.note = "one characteristic number, holds automatically";
    rep.conditions["G6"] = c;
  }
  if (s >= 2) {
    ConditionResult c;
    c.applicable = true;
    c.required = s;
    std::vector<std::string> prereq = {"G1", "G2", "G3", "G4", "G5"};
    if (!dims.equal()) prereq.push_back("G8");
    if (!rep.all_hold(prereq)) {
      c.holds = false;
      c.note = "not evaluated: prerequisite condition fails";
    } else {
      try {
        CharNumbers cn = characteristic_numbers(reduce(lt, dims, tol), tol);
        c.measured = cn.distinct;
        c.holds = cn.distinct == s;
        c.note = "number of distinct characteristic numbers";
      } catch (const Error& e) {
        c.holds = false;
        c.note = std::string("not evaluated: ") + e.what();
      }
    }
    rep.conditions["G6"] = c;
  }
  return rep;
}

ReducedLinearization reduce(const LinearTuple& lt, const Dims& dims, const ToleranceConfig& tol) {
  const int d = lt.ambient_dim;
  const int n = d / 2;
  const int s = invariant_count(dims, n);
  const bool odd = dims.k1 % 2 != 0;

  Subspace w(d, Matrix(d, 0));
  if (dims.equal()) {
    const int k = dims.k1;
    Subspace core = k <= n ? subspace_sum(lt.u1, lt.u2, tol)
                           : skew_complement(subspace_intersect(lt.u1, lt.u2, tol), lt.mu, tol);
    if (!odd) {
      w = core;
    } else {
      Subspace l1 = kernel_line(lt.mu, lt.u1, tol);
      Subspace l2 = kernel_line(lt.mu, lt.u2, tol);
      if (l1.dim() != 1 || l2.dim() != 1)
        throw GenericityViolation("reduce: kernel of the restricted form is not a line");
      w = subspace_intersect(core, skew_complement(subspace_sum(l1, l2, tol), lt.mu, tol), tol);
    }
  } else {
    Subspace core = dims.k1 + dims.k2 <= d
                        ? subspace_sum(lt.u1, lt.u2, tol)
                        : skew_complement(subspace_intersect(lt.u1, lt.u2, tol), lt.mu, tol);
    Subspace mixed = subspace_sum(lt.u1, skew_complement(lt.u2, lt.mu, tol), tol);
    w = subspace_intersect(core, mixed, tol);
    if (odd) {
      Subspace l1 = kernel_line(lt.mu, lt.u1, tol);
      Subspace l2 = kernel_line(lt.mu, lt.u2, tol);
      if (l1.dim() != 1 || l2.dim() != 1)
        throw GenericityViolation("reduce: kernel of the restricted form is not a line");
      w = subspace_intersect(w, skew_complement(subspace_sum(l1, l2, tol), lt.mu, tol), tol);
    }
  }

  ReducedLinearization rl;
  rl.s = s;
  rl.w_basis = w.basis;
  if (w.dim() != 4 * s)
    throw GenericityViolation("(a) dim W = " + std::to_string(w.dim()) + ", expected 4s = " +
                              std::to_string(4 * s));
  rl.sigma = restricted_gram(lt.mu, w);
  if (numerical_rank(rl.sigma, tol) != 4 * s)
    throw GenericityViolation("(b) the restricted form on W is degenerate");

  Subspace c1 = subspace_intersect(lt.u1, w, tol);
  Subspace c2 = subspace_intersect(lt.u2, w, tol);
  if (c1.dim() != 2 * s || c2.dim() != 2 * s)
    throw GenericityViolation("(c) dim U1 = " + std::to_string(c1.dim()) + ", dim U2 = " +
                              std::to_string(c2.dim()) + ", expected 2s = " +
                              std::to_string(2 * s));
  rl.u1 = coords_in_basis(rl.w_basis, c1.basis, tol);
  rl.u2 = coords_in_basis(rl.w_basis, c2.basis, tol);

  Matrix g1 = rl.u1.transpose() * rl.sigma * rl.u1;
  Matrix g2 = rl.u2.transpose() * rl.sigma * rl.u2;
  if (numerical_rank(g1, tol) != 2 * s || numerical_rank(g2, tol) != 2 * s)
    throw GenericityViolation("(c) U1 or U2 is not symplectic in (W, sigma)");
  Matrix both(4 * s, 4 * s);
  if (s > 0) {
    both << rl.u1, rl.u2;
    if (numerical_rank(both, tol) != 4 * s)
      throw GenericityViolation("(c) U1 and U2 are not transversal in W");
    Matrix u1s = null_basis((rl.sigma * rl.u1).transpose(), tol);
    Matrix mixed(4 * s, u1s.cols() + 2 * s);
    mixed << u1s, rl.u2;
    if (numerical_rank(mixed, tol) != 4 * s)
      throw GenericityViolation("(d) U1^sigma is not transversal to U2 in W");
  }
  return rl;
}

std::pair<Matrix, Matrix> transfer_operators(const ReducedLinearization& rl,
                                             const ToleranceConfig& tol) {
  const int s = rl.s;
  if (s == 0) return {Matrix(0, 0), Matrix(0, 0)};
  Matrix u1s = null_basis((rl.sigma * rl.u1).transpose(), tol);
  Matrix u2s = null_basis((rl.sigma * rl.u2).transpose(), tol);
  Matrix p1(4 * s, 4 * s), p2(4 * s, 4 * s);
  p1 << rl.u1, u1s;
  p2 << rl.u2, u2s;
  if (numerical_rank(p1, tol) != 4 * s || numerical_rank(p2, tol) != 4 * s)
    throw DegenerateSplitting("transfer_operators: direct-sum solve is singular");
  auto q1 = p1.colPivHouseholderQr();
  auto q2 = p2.colPivHouseholderQr();
  // pi_i(v) = U_i * head(P_i^-1 v); T1 = pi_1 o (pi_2 | U1), T2 symmetric.
  Matrix pi2_of_u1 = rl.u2 * Matrix(q2.solve(rl.u1)).topRows(2 * s);
  Matrix t1 = Matrix(q1.solve(pi2_of_u1)).topRows(2 * s);
  Matrix pi1_of_u2 = rl.u1 * Matrix(q1.solve(rl.u2)).topRows(2 * s);
  Matrix t2 = Matrix(q2.solve(pi1_of_u2)).topRows(2 * s);
  return {t1, t2};
}

ABCMatrices extract_ABC(const ReducedLinearization& rl, const ToleranceConfig& tol) {
  const int s = rl.s;
  ABCMatrices abc;
  Matrix ga = rl.u1.transpose() * rl.sigma * rl.u1;
  abc.a = -0.25 * (ga - ga.transpose().eval());
  Matrix gb = 0.5 * (rl.u2.transpose() * rl.sigma * rl.u2);
  gb = 0.5 * (gb - gb.transpose().eval());
  if (numerical_rank(gb, tol) != 2 * s)
    throw GenericityViolation("extract_ABC: the form is degenerate on U2");
  if (s > 0) {
    Matrix binv = gb.inverse();
    abc.b = 0.5 * (binv - binv.transpose().eval());
  } else {
    abc.b = Matrix(0, 0);
  }
  abc.c = rl.u1.transpose() * rl.sigma * rl.u2;
  if (numerical_rank(abc.c, tol) != 2 * s)
    throw SingularC("extract_ABC: cross matrix C is singular (G5 failure)");
  return abc;
}

ABCMatrices c_normalize(const ABCMatrices& abc, const ToleranceConfig& tol) {
  const int m = static_cast<int>(abc.a.rows());
  if (m == 0) return abc;
  if (numerical_rank(abc.c, tol) != m)
    throw SingularC("c_normalize: cross matrix C is singular");
  // Basis change u1 -> u1 P with P^t C = I.
  Matrix p = abc.c.inverse().transpose();
  ABCMatrices out;
  Matrix a2 = p.transpose() * abc.a * p;
  out.a = 0.5 * (a2 - a2.transpose().eval());
  out.b = abc.b;
  out.c = Matrix::Identity(m, m);
  return out;
}

CharNumbers characteristic_numbers(const ReducedLinearization& rl, const ToleranceConfig& tol) {
  CharNumbers cn;
  if (rl.s == 0) return cn;
  auto [t1, t2] = transfer_operators(rl, tol);
  (void)t2;
  ComplexMultiset route1 = eigen_multiset(t1, tol);

  ABCMatrices norm = c_normalize(extract_ABC(rl, tol), tol);
  Matrix m2 = 0.25 * norm.a.inverse() * norm.b;
  ComplexMultiset route2 = eigen_multiset(m2, tol);

  if (!multiset_equal(route1, route2, tol))
    throw RouteMismatch("characteristic_numbers: transfer-operator and A^-1 B spectra disagree");

  cn.raw = route1;  // sorted by (real, imag)
  // Greedy nearest-partner pairing; sorting alone can interleave a
  // conjugate quadruple whose real parts tie up to roundoff.
  ComplexMultiset rest = cn.raw;
  while (!rest.empty()) {
    const Complex a = rest.front();
    rest.erase(rest.begin());
    std::size_t best = 0;
    for (std::size_t j = 1; j < rest.size(); ++j)
      if (std::abs(rest[j] - a) < std::abs(rest[best] - a)) best = j;
    if (rest.empty() || std::abs(rest[best] - a) > tol.eig_pair_tol * (1.0 + std::abs(a)))
      throw UnpairedEigenvalue("characteristic_numbers: multiplicity-2 pairing failed");
    cn.collapsed.push_back(0.5 * (a + rest[best]));
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
  }
  sort_multiset(cn.collapsed);
  cn.collapsed = conjugate_symmetrize(cn.collapsed);
  cn.distinct = distinct_count(cn.collapsed, tol);
  return cn;
}

namespace {

// Congruence T with T^t A T in 2x2/4x4 block canonical form ordered by the
// sorted collapsed spectrum; T^t B T is then automatically 4*J*Lambda
// block-diagonal with the pair's own eigenvalues.
Matrix pencil_canonical_basis(const Matrix& a, const Matrix& b, const ComplexMultiset& collapsed,
                              const ToleranceConfig& tol) {
  const int m = static_cast<int>(a.rows());
  Matrix op = 0.25 * a.inverse() * b;
  Eigen::EigenSolver<Matrix> es(op, true);
  if (es.info() != Eigen::Success)
    throw NoConvergence("linear_equivalence_witness: eigensolver failed");
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();

  std::vector<char> used(m, 0);
  auto take_nearest = [&](Complex target) {
    int best = -1;
    double best_d = 0.0;
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      double d = std::abs(Complex(vals(j)) - target);
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best < 0) throw InternalError("pencil_canonical_basis: ran out of eigenvectors");
    used[best] = 1;
    return best;
  };

  Matrix t(m, m);
  int col = 0;
  for (std::size_t ci = 0; ci < collapsed.size(); ++ci) {
    const Complex lambda = collapsed[ci];
    const bool real_like = std::abs(lambda.imag()) <= tol.eig_pair_tol * (1.0 + std::abs(lambda));
    if (real_like) {
      int j1 = take_nearest(lambda);
      int j2 = take_nearest(lambda);
      Vector u = vecs.col(j1).real();
      Vector w = vecs.col(j2).real();
      double scale = u.transpose() * a * w;
      if (std::abs(scale) < tol.rank_tol)
        throw DegenerateSpectrum("linear_equivalence_witness: degenerate eigenspace pairing");
      w /= scale;
      t.col(col++) = u;
      t.col(col++) = w;
    } else if (lambda.imag() > 0.0) {
      // One 4x4 block per conjugate pair; the partner with negative
      // imaginary part is consumed here.
      int j1 = take_nearest(lambda);
      int j2 = take_nearest(lambda);
      take_nearest(std::conj(lambda));
      take_nearest(std::conj(lambda));
      Eigen::VectorXcd z1 = vecs.col(j1);
      Eigen::VectorXcd z2 = vecs.col(j2);
      Complex scale = z1.transpose() * a.cast<Complex>() * z2;
      if (std::abs(scale) < tol.rank_tol)
        throw DegenerateSpectrum("linear_equivalence_witness: degenerate eigenspace pairing");
      z2 /= scale;
      const double r2 = std::sqrt(2.0);
      t.col(col++) = r2 * z1.real();
      t.col(col++) = r2 * z2.real();
      t.col(col++) = r2 * z1.imag();
      t.col(col++) = -r2 * z2.imag();
    }
  }
  if (col != m) throw InternalError("linear_equivalence_witness: basis construction incomplete");
  return t;
}

}  // namespace

std::optional<Matrix> linear_equivalence_witness(const ReducedLinearization& rl1,
                                                 const ReducedLinearization& rl2,
                                                 const ToleranceConfig& tol) {
  if (rl1.s != rl2.s)
    throw DimensionMismatch("linear_equivalence_witness: reductions have different s");
  if (rl1.s == 0) return Matrix(0, 0);

  CharNumbers cn1 = characteristic_numbers(rl1, tol);
  CharNumbers cn2 = characteristic_numbers(rl2, tol);
  if (cn1.distinct < rl1.s || cn2.distinct < rl2.s)
    throw DegenerateSpectrum("linear_equivalence_witness: repeated characteristic numbers");
  if (!multiset_equal(cn1.collapsed, cn2.collapsed, tol)) return std::nullopt;

  ABCMatrices abc1 = c_normalize(extract_ABC(rl1, tol), tol);
  ABCMatrices abc2 = c_normalize(extract_ABC(rl2, tol), tol);
  Matrix t1 = pencil_canonical_basis(abc1.a, abc1.b, cn1.collapsed, tol);
  Matrix t2 = pencil_canonical_basis(abc2.a, abc2.b, cn2.collapsed, tol);
  return t1 * t2.inverse();
}

ModuliCount moduli_count(int k, int n) {
  if (n < 1 || k < 1 || k > 2 * n - 1)
    throw OutOfRange("moduli_count: need 1 <= k <= 2n-1");
  ModuliCount m;
  if (k == 1 || k == 2 * n - 1) {
    m.value = 0;
  } else if (k <= n) {
    m.value = k / 2;
  } else if (k >= 2 * n - 3) {
    m.value = 1;
  } else {
    m.infinite = true;
  }
  return m;
}

}  // namespace symgerm
