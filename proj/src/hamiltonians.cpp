#include "symgerm/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace symgerm {

namespace {

// Reduced column echelon basis of a span: deterministic and aligned with
// coordinate axes whenever the span is a coordinate subspace.
Matrix canonical_span_basis(const Matrix& basis, const ToleranceConfig& tol) {
  Matrix m = basis.transpose();  // rows = generators
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  int lead = 0;
  for (int r = 0; r < rows && lead < cols; ++r) {
    int pivot = -1;
    double best = tol.rank_tol;
    for (; lead < cols; ++lead) {
      pivot = -1;
      best = tol.rank_tol;
      for (int i = r; i < rows; ++i)
        if (std::abs(m(i, lead)) > best) {
          best = std::abs(m(i, lead));
          pivot = i;
        }
      if (pivot >= 0) break;
    }
    if (pivot < 0) break;
    m.row(r).swap(m.row(pivot));
    m.row(r) /= m(r, lead);
    for (int i = 0; i < rows; ++i)
      if (i != r) m.row(i) -= m(i, lead) * m.row(r);
    ++lead;
  }
  return m.topRows(std::min(rows, cols)).transpose();
}

Vector eval_exprs(const std::vector<ExprPtr>& exprs, const CoordFrame& frame, const Vector& at) {
  Vector v(exprs.size());
  for (std::size_t i = 0; i < exprs.size(); ++i) v(static_cast<int>(i)) = eval(exprs[i], frame, at);
  return v;
}

Matrix jac_exprs(const std::vector<ExprPtr>& exprs, const CoordFrame& frame, const Vector& at) {
  Matrix j(exprs.size(), frame.size());
  for (std::size_t r = 0; r < exprs.size(); ++r)
    for (int c = 0; c < frame.size(); ++c)
      j(static_cast<int>(r), c) = eval(differentiate(exprs[r], frame.names[c]), frame, at);
  return j;
}

}  // namespace

QChart::QChart(const GermPair& gp, const ToleranceConfig& tol) : gp_(&gp), tol_(tol) {
  const int d = gp.ambient_dim();
  if (gp.k1 + gp.k2 <= d)
    throw WrongRegime("intersection chart requires k1 + k2 > 2n");
  anchor_ = gp.base_point;
  Subspace t1 = stratum_tangent(gp, 0, anchor_, tol);
  Subspace t2 = stratum_tangent(gp, 1, anchor_, tol);
  if (subspace_sum(t1, t2, tol).dim() != d)
    throw GenericityViolation("intersection chart requires the regularity condition (G2)");
  Subspace cap = subspace_intersect(t1, t2, tol);
  if (cap.dim() != gp.k1 + gp.k2 - d)
    throw GenericityViolation("intersection chart: unexpected tangent intersection dimension");
  tangent_ = canonical_span_basis(cap.basis, tol);
  // Orthonormalize columns while keeping the canonical alignment.
  Eigen::HouseholderQR<Matrix> qr(tangent_);
  Matrix q = qr.householderQ() * Matrix::Identity(d, tangent_.cols());
  Matrix r = q.transpose() * tangent_;
  for (int i = 0; i < q.cols(); ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  tangent_ = q;
}

QChart::Point QChart::map(const Vector& t) const {
  const GermPair& gp = *gp_;
  const int d = gp.ambient_dim();
  const Vector target = anchor_ + tangent_ * t;
  const double scale = 1.0 + target.norm();
  const StratumGerm& s1 = gp.strata[0];
  const StratumGerm& s2 = gp.strata[1];
  const bool p1 = s1.kind == StratumGerm::Kind::Parametric;
  const bool p2 = s2.kind == StratumGerm::Kind::Parametric;

  auto init_params = [&](const StratumGerm& st) {
    Matrix j = jac_exprs(st.exprs, st.vars, Vector::Zero(st.dim));
    return Vector(j.colPivHouseholderQr().solve(target - gp.base_point));
  };

  Point out;
  auto finish = [&](const Vector& ambient, double residual) {
    if (residual > 1e-12 * scale)
      throw NewtonDivergence("intersection chart: Newton residual " + std::to_string(residual));
    out.ambient = ambient;
    out.residual = residual;
    return out;
  };

  if (p1 && p2) {
    Vector a = init_params(s1), b = init_params(s2);
    for (int iter = 0; iter < 40; ++iter) {
      Vector f1 = eval_exprs(s1.exprs, s1.vars, a);
      Vector f2 = eval_exprs(s2.exprs, s2.vars, b);
      Vector res(d + dim_q());
      res.head(d) = f1 - f2;
      res.tail(dim_q()) = tangent_.transpose() * (f1 - target);
      if (res.norm() <= 1e-13 * scale) break;
      Matrix j1 = jac_exprs(s1.exprs, s1.vars, a);
      Matrix j2 = jac_exprs(s2.exprs, s2.vars, b);
      Matrix jac(d + dim_q(), gp.k1 + gp.k2);
      jac.setZero();
      jac.topLeftCorner(d, gp.k1) = j1;
      jac.topRightCorner(d, gp.k2) = -j2;
      jac.bottomLeftCorner(dim_q(), gp.k1) = tangent_.transpose() * j1;
      Vector step = jac.colPivHouseholderQr().solve(res);
      a -= step.head(gp.k1);
      b -= step.tail(gp.k2);
      if (!step.allFinite()) break;
    }
    Vector f1 = eval_exprs(s1.exprs, s1.vars, a);
    Vector f2 = eval_exprs(s2.exprs, s2.vars, b);
    Vector res(d + dim_q());
    res.head(d) = f1 - f2;
    res.tail(dim_q()) = tangent_.transpose() * (f1 - target);
    out.params1 = a;
    out.params2 = b;
    return finish(0.5 * (f1 + f2), res.norm());
  }

  if (!p1 && !p2) {
    Vector q = target;
    const int m1 = static_cast<int>(s1.exprs.size());
    const int m2 = static_cast<int>(s2.exprs.size());
    for (int iter = 0; iter < 40; ++iter) {
      Vector res(m1 + m2 + dim_q());
      res.head(m1) = eval_exprs(s1.exprs, gp.coords, q);
      res.segment(m1, m2) = eval_exprs(s2.exprs, gp.coords, q);
      res.tail(dim_q()) = tangent_.transpose() * (q - target);
      if (res.norm() <= 1e-13 * scale) break;
      Matrix jac(m1 + m2 + dim_q(), d);
      jac.topRows(m1) = jac_exprs(s1.exprs, gp.coords, q);
      jac.middleRows(m1, m2) = jac_exprs(s2.exprs, gp.coords, q);
      jac.bottomRows(dim_q()) = tangent_.transpose();
      Vector step = jac.colPivHouseholderQr().solve(res);
      q -= step;
      if (!step.allFinite()) break;
    }
    Vector res(m1 + m2 + dim_q());
    res.head(m1) = eval_exprs(s1.exprs, gp.coords, q);
    res.segment(m1, m2) = eval_exprs(s2.exprs, gp.coords, q);
    res.tail(dim_q()) = tangent_.transpose() * (q - target);
    return finish(q, res.norm());
  }

  // Mixed case: solve in the parameters of the parametric stratum, with
  // the implicit equations of the other stratum as constraints.
  const StratumGerm& par = p1 ? s1 : s2;
  const StratumGerm& imp = p1 ? s2 : s1;
  const int mi = static_cast<int>(imp.exprs.size());
  Vector a = init_params(par);
  for (int iter = 0; iter < 40; ++iter) {
    Vector pt = eval_exprs(par.exprs, par.vars, a);
    Vector res(mi + dim_q());
    res.head(mi) = eval_exprs(imp.exprs, gp.coords, pt);
    res.tail(dim_q()) = tangent_.transpose() * (pt - target);
    if (res.norm() <= 1e-13 * scale) break;
    Matrix jp = jac_exprs(par.exprs, par.vars, a);
    Matrix jac(mi + dim_q(), par.dim);
    jac.topRows(mi) = jac_exprs(imp.exprs, gp.coords, pt) * jp;
    jac.bottomRows(dim_q()) = tangent_.transpose() * jp;
    Vector step = jac.colPivHouseholderQr().solve(res);
    a -= step;
    if (!step.allFinite()) break;
  }
  Vector pt = eval_exprs(par.exprs, par.vars, a);
  Vector res(mi + dim_q());
  res.head(mi) = eval_exprs(imp.exprs, gp.coords, pt);
  res.tail(dim_q()) = tangent_.transpose() * (pt - target);
  if (p1)
    out.params1 = a;
  else
    out.params2 = a;
  return finish(pt, res.norm());
}

Matrix omega_Q(const GermPair& gp, const QChart& chart, const Vector& point_params,
               const ToleranceConfig& tol) {
  QChart::Point pt = chart.map(point_params);
  Subspace t1 = stratum_tangent(gp, 0, pt.ambient, tol, pt.params1);
  Subspace t2 = stratum_tangent(gp, 1, pt.ambient, tol, pt.params2);
  Subspace cap = subspace_intersect(t1, t2, tol);
  // Echelon basis of T_q Q keeps the Gram coordinate-aligned and stable
  // across nearby points.
  Matrix m = canonical_span_basis(cap.basis, tol);
  Matrix g = restricted_gram(omega_at(gp, pt.ambient), Subspace(cap.ambient_dim, m));
  if (numerical_rank(g, tol) != static_cast<int>(g.rows()))
    throw DegenerateRestriction("omega_Q: the restricted form is degenerate at this point");
  return g;
}

namespace {

std::vector<Vector> build_grid(int dim_q, const GridSpec& grid) {
  const int p = std::max(1, grid.points_per_axis);
  std::vector<double> axis(p);
  if (p == 1) {
    axis[0] = 0.0;
  } else {
    for (int i = 0; i < p; ++i) axis[i] = -grid.radius + 2.0 * grid.radius * i / (p - 1);
  }
  std::vector<Vector> points;
  std::vector<int> idx(dim_q, 0);
  const int total = static_cast<int>(std::pow(static_cast<double>(p), dim_q));
  for (int t = 0; t < total; ++t) {
    Vector v(dim_q);
    int rest = t;
    for (int a = dim_q - 1; a >= 0; --a) {
      v(a) = axis[rest % p];
      rest /= p;
    }
    points.push_back(v);
  }
  return points;
}

}  // namespace

HamiltonianField sample_hamiltonians(const GermPair& gp, const QChart& chart, const GridSpec& grid,
                                     const ToleranceConfig& tol) {
  HamiltonianField field;
  field.dim_q = chart.dim_q();
  field.grid = grid;
  field.s = invariant_count(Dims(gp.k1, gp.k2), gp.n);
  field.params = build_grid(field.dim_q, grid);
  const int total = static_cast<int>(field.params.size());
  field.branches.assign(total, {});

  Dims dims(gp.k1, gp.k2);
  std::vector<std::string> prereq = {"G1", "G2", "G3", "G4", "G5"};
  if (!dims.equal()) prereq.push_back("G8");

  std::vector<std::optional<ComplexMultiset>> values(total);
  for (int i = 0; i < total; ++i) {
    try {
      QChart::Point pt = chart.map(field.params[i]);
      LinearTuple lt;
      lt.ambient_dim = gp.ambient_dim();
      lt.mu = omega_at(gp, pt.ambient);
      if (numerical_rank(lt.mu, tol) != lt.ambient_dim)
        throw SingularForm("omega singular at grid point");
      lt.u1 = stratum_tangent(gp, 0, pt.ambient, tol, pt.params1);
      lt.u2 = stratum_tangent(gp, 1, pt.ambient, tol, pt.params2);
      GenericityReport rep = check_genericity_linear(lt, dims, tol);
      if (auto fail = rep.first_failure(prereq)) {
        field.excluded.push_back(i);
        field.excluded_reasons.push_back("genericity condition " + *fail + " fails");
        continue;
      }
      CharNumbers cn = characteristic_numbers(reduce(lt, dims, tol), tol);
      values[i] = cn.collapsed;
    } catch (const Error& e) {
      field.excluded.push_back(i);
      field.excluded_reasons.push_back(e.what());
    }
  }

  // Match branches from the anchor outward by nearest-value continuation.
  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return field.params[a].lpNorm<1>() < field.params[b].lpNorm<1>();
  });
  const int p = std::max(1, grid.points_per_axis);
  auto neighbors = [&](int i) {
    std::vector<int> out;
    int stride = 1;
    for (int a = field.dim_q - 1; a >= 0; --a) {
      int coord = (i / stride) % p;
      if (coord > 0) out.push_back(i - stride);
      if (coord + 1 < p) out.push_back(i + stride);
      stride *= p;
    }
    return out;
  };

  std::vector<char> assigned(total, 0);
  for (int oi = 0; oi < total; ++oi) {
    const int i = order[oi];
    if (!values[i]) continue;
    ComplexMultiset vals = *values[i];

    // Ambiguity flag: two sampled values close at pairing tolerance.
    for (std::size_t a = 0; a < vals.size(); ++a)
      for (std::size_t b = a + 1; b < vals.size(); ++b)
        if (std::abs(vals[a] - vals[b]) <= tol.eig_pair_tol * (1.0 + std::abs(vals[a]))) {
          field.crossing_flags.push_back(i);
          a = vals.size();
          break;
        }

    const std::vector<Complex>* ref = nullptr;
    double best_dist = 0.0;
    for (int nb : neighbors(i)) {
      if (!assigned[nb]) continue;
      double dnb = (field.params[nb] - field.params[i]).norm();
      if (!ref || dnb < best_dist) {
        ref = &field.branches[nb];
        best_dist = dnb;
      }
    }
    if (!ref) {
      sort_multiset(vals);
      field.branches[i] = vals;
    } else {
      std::vector<Complex> matched(ref->size());
      std::vector<char> used(vals.size(), 0);
      for (std::size_t j = 0; j < ref->size(); ++j) {
        int pick = -1;
        double pd = 0.0;
        for (std::size_t v = 0; v < vals.size(); ++v) {
          if (used[v]) continue;
          double dv = std::abs(vals[v] - (*ref)[j]);
          if (pick < 0 || dv < pd) {
            pick = static_cast<int>(v);
            pd = dv;
          }
        }
        used[pick] = 1;
        matched[j] = vals[pick];
      }
      field.branches[i] = matched;
    }
    assigned[i] = 1;
  }

  // Anchor values: the grid point closest to the chart origin.
  int anchor = -1;
  for (int i : order)
    if (assigned[i]) {
      anchor = i;
      break;
    }
  if (anchor < 0)
    throw GenericityViolation("sample_hamiltonians: every grid point failed genericity");
  field.base_values = field.branches[anchor];
  return field;
}

G7Result check_G7(const HamiltonianField& field, const ToleranceConfig& tol) {
  if (field.s != 1)
    throw WrongRegime("check_G7: defined only in the single-Hamiltonian regime (s = 1)");
  const int p = field.grid.points_per_axis;
  if (p < 3 || p % 2 == 0)
    throw InvalidSpec("check_G7: needs an odd grid with at least 3 points per axis");
  const double step = 2.0 * field.grid.radius / (p - 1);
  const int d = field.dim_q;
  int center = 0;
  for (int a = 0; a < d; ++a) center = center * p + p / 2;

  G7Result res;
  res.gradient = Vector::Zero(d);
  int stride = 1;
  for (int a = d - 1; a >= 0; --a) {
    const int plus = center + stride;
    const int minus = center - stride;
    if (field.branches[plus].empty() || field.branches[minus].empty())
      throw GenericityViolation("check_G7: grid neighbors of the anchor were excluded");
    res.gradient(a) =
        (field.branches[plus][0].real() - field.branches[minus][0].real()) / (2.0 * step);
    stride *= p;
  }
  res.holds = res.gradient.norm() > 100.0 * tol.eig_pair_tol / step;
  return res;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string field_to_csv(const HamiltonianField& field) {
  std::ostringstream out;
  for (int a = 0; a < field.dim_q; ++a) out << (a ? "," : "") << "param" << a + 1;
  for (int j = 0; j < field.s; ++j)
    out << ",branch" << j + 1 << "_re,branch" << j + 1 << "_im";
  out << "\n";
  for (std::size_t i = 0; i < field.params.size(); ++i) {
    if (field.branches[i].empty()) continue;
    for (int a = 0; a < field.dim_q; ++a) out << (a ? "," : "") << fmt(field.params[i](a));
    for (const auto& v : field.branches[i]) out << "," << fmt(v.real()) << "," << fmt(v.imag());
    out << "\n";
  }
  return out.str();
}

nlohmann::json field_to_json(const HamiltonianField& field, const ToleranceConfig& tol) {
  nlohmann::json j;
  j["dim_q"] = field.dim_q;
  j["s"] = field.s;
  j["grid"] = {{"points_per_axis", field.grid.points_per_axis},
               {"radius", fmt(field.grid.radius)}};
  j["tolerances"] = {{"rank_tol", fmt(tol.rank_tol)},
                     {"eig_pair_tol", fmt(tol.eig_pair_tol)},
                     {"eig_distinct_tol", fmt(tol.eig_distinct_tol)}};
  j["excluded"] = field.excluded;
  j["excluded_reasons"] = field.excluded_reasons;
  j["crossing_flags"] = field.crossing_flags;
  nlohmann::json base = nlohmann::json::array();
  for (const auto& v : field.base_values) base.push_back({fmt(v.real()), fmt(v.imag())});
  j["base_values"] = base;
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < field.params.size(); ++i) {
    if (field.branches[i].empty()) continue;
    nlohmann::json row;
    nlohmann::json params = nlohmann::json::array();
    for (int a = 0; a < field.dim_q; ++a) params.push_back(fmt(field.params[i](a)));
    row["params"] = params;
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : field.branches[i]) vals.push_back({fmt(v.real()), fmt(v.imag())});
    row["branches"] = vals;
    samples.push_back(row);
  }
  j["samples"] = samples;
  return j;
}

}  // namespace symgerm
