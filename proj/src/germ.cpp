#include "symgerm/germ.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace symgerm {

namespace {

Matrix stratum_jacobian(const StratumGerm& st, const Vector& at) {
  Matrix j(st.exprs.size(), st.vars.size());
  for (std::size_t r = 0; r < st.exprs.size(); ++r)
    for (int c = 0; c < st.vars.size(); ++c)
      j(static_cast<int>(r), c) = eval(differentiate(st.exprs[r], st.vars.names[c]), st.vars, at);
  return j;
}

Vector stratum_value(const StratumGerm& st, const Vector& at) {
  Vector v(st.exprs.size());
  for (std::size_t r = 0; r < st.exprs.size(); ++r)
    v(static_cast<int>(r)) = eval(st.exprs[r], st.vars, at);
  return v;
}

}  // namespace

Matrix omega_at(const GermPair& gp, const Vector& point) {
  const int d = gp.ambient_dim();
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = eval(gp.omega[i][j], gp.coords, point);
  return 0.5 * (m - m.transpose().eval());
}

Vector stratum_parameters(const GermPair& gp, int stratum_index, const Vector& point,
                          const ToleranceConfig& tol, const std::optional<Vector>& param_hint) {
  const StratumGerm& st = gp.strata[stratum_index];
  if (st.kind != StratumGerm::Kind::Parametric)
    throw InternalError("stratum_parameters: stratum is implicit");
  Vector t = param_hint ? *param_hint : Vector::Zero(st.dim);
  const double scale = 1.0 + point.norm();
  for (int iter = 0; iter < 50; ++iter) {
    Vector r = point - stratum_value(st, t);
    if (r.norm() <= 1e-12 * scale) return t;
    Matrix j = stratum_jacobian(st, t);
    Vector step = j.colPivHouseholderQr().solve(r);
    t += step;
    if (!step.allFinite()) break;
  }
  Vector r = point - stratum_value(st, t);
  if (r.norm() <= 1e-9 * scale) return t;
  throw PointNotOnStratum("stratum_parameters: Gauss-Newton residual " +
                          std::to_string(r.norm()) + " at stratum " +
                          std::to_string(stratum_index + 1));
}

Subspace stratum_tangent(const GermPair& gp, int stratum_index, const Vector& point,
                         const ToleranceConfig& tol, const std::optional<Vector>& param_hint) {
  const StratumGerm& st = gp.strata[stratum_index];
  const int d = gp.ambient_dim();
  if (st.kind == StratumGerm::Kind::Implicit) {
    Vector f = stratum_value(st, point);
    if (f.norm() > 1e-9 * (1.0 + point.norm()))
      throw PointNotOnStratum("stratum_tangent: implicit equations do not vanish at the point");
    Matrix j = stratum_jacobian(st, point);
    if (numerical_rank(j, tol) != d - st.dim)
      throw PointNotOnStratum("stratum_tangent: implicit Jacobian rank deficient at the point");
    return Subspace(d, null_basis(j, tol));
  }
  Vector t = stratum_parameters(gp, stratum_index, point, tol, param_hint);
  Matrix j = stratum_jacobian(st, t);
  if (numerical_rank(j, tol) != st.dim)
    throw PointNotOnStratum("stratum_tangent: parametric Jacobian rank deficient at the point");
  return Subspace(d, j);
}

namespace {

StratumGerm parse_stratum(const nlohmann::json& obj, int n, int k, const CoordFrame& coords,
                          int index) {
  StratumGerm st;
  st.dim = k;
  const std::string where = "stratum " + std::to_string(index + 1);
  if (!obj.contains("kind") || !obj.contains("exprs"))
    throw ValidationError(where + ": missing 'kind' or 'exprs'");
  std::string kind = obj.at("kind").get<std::string>();
  if (kind == "parametric")
    st.kind = StratumGerm::Kind::Parametric;
  else if (kind == "implicit")
    st.kind = StratumGerm::Kind::Implicit;
  else
    throw ValidationError(where + ": kind must be 'parametric' or 'implicit'");

  std::vector<std::string> vars;
  if (st.kind == StratumGerm::Kind::Parametric) {
    if (!obj.contains("vars")) throw ValidationError(where + ": parametric stratum needs 'vars'");
    vars = obj.at("vars").get<std::vector<std::string>>();
    if (static_cast<int>(vars.size()) != k)
      throw ValidationError(where + ": expected " + std::to_string(k) + " parameters");
  } else {
    vars = coords.names;
  }
  st.vars = CoordFrame(vars);

  auto texts = obj.at("exprs").get<std::vector<std::string>>();
  const std::size_t expected =
      st.kind == StratumGerm::Kind::Parametric ? static_cast<std::size_t>(2 * n)
                                               : static_cast<std::size_t>(2 * n - k);
  if (texts.size() != expected)
    throw ValidationError(where + ": expected " + std::to_string(expected) + " expressions, got " +
                          std::to_string(texts.size()));
  for (const auto& txt : texts) st.exprs.push_back(parse_expression(txt));
  for (const auto& e : st.exprs) {
    std::vector<std::string> used;
    collect_vars(e, used);
    for (const auto& name : used)
      if (!st.vars.index.count(name))
        throw ValidationError(where + ": unknown variable '" + name + "'");
  }
  return st;
}

double closedness_residual_at(const GermPair& gp) {
  // d-omega components: (d omega)_{abc} = d_a w_bc - d_b w_ac + d_c w_ab.
  const int d = gp.ambient_dim();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      for (int c = b + 1; c < d; ++c) {
        double v = eval(differentiate(gp.omega[b][c], gp.coords.names[a]), gp.coords, gp.base_point) -
                   eval(differentiate(gp.omega[a][c], gp.coords.names[b]), gp.coords, gp.base_point) +
                   eval(differentiate(gp.omega[a][b], gp.coords.names[c]), gp.coords, gp.base_point);
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

}  // namespace

GermPair load_germ_pair(const nlohmann::json& doc, const ToleranceConfig& tol) {
  GermPair gp;
  if (!doc.contains("n")) throw ValidationError("document: missing 'n'");
  gp.n = doc.at("n").get<int>();
  if (gp.n < 1) throw ValidationError("document: n must be positive");
  const int d = 2 * gp.n;

  if (doc.contains("k")) {
    gp.k1 = gp.k2 = doc.at("k").get<int>();
  } else if (doc.contains("k1") && doc.contains("k2")) {
    gp.k1 = doc.at("k1").get<int>();
    gp.k2 = doc.at("k2").get<int>();
    if (gp.k1 >= gp.k2) throw ValidationError("document: k1 must be smaller than k2");
  } else {
    throw ValidationError("document: missing 'k' or 'k1'/'k2'");
  }
  if (gp.k1 < 1 || gp.k2 > d - 1)
    throw ValidationError("document: stratum dimensions out of range 1..2n-1");
  if ((gp.k1 + gp.k2) % 2 != 0) throw ValidationError("document: k1 + k2 must be even");

  if (!doc.contains("coords")) throw ValidationError("document: missing 'coords'");
  auto names = doc.at("coords").get<std::vector<std::string>>();
  if (static_cast<int>(names.size()) != d)
    throw ValidationError("document: 'coords' must list 2n names");
  gp.coords = CoordFrame(names);

  if (!doc.contains("base_point")) throw ValidationError("document: missing 'base_point'");
  auto base = doc.at("base_point").get<std::vector<double>>();
  if (static_cast<int>(base.size()) != d)
    throw ValidationError("document: 'base_point' must have 2n entries");
  gp.base_point = Eigen::Map<const Vector>(base.data(), d);

  if (!doc.contains("omega")) throw ValidationError("document: missing 'omega'");
  const auto& om = doc.at("omega");
  if (!om.is_array() || static_cast<int>(om.size()) != d)
    throw ValidationError("document: 'omega' must be a 2n x 2n array");
  gp.omega.resize(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(om[i].size()) != d)
      throw ValidationError("document: 'omega' must be a 2n x 2n array");
    for (int j = 0; j < d; ++j)
      gp.omega[i].push_back(parse_expression(om[i][j].get<std::string>()));
  }

  if (!doc.contains("strata")) throw ValidationError("document: missing 'strata'");
  const auto& strata = doc.at("strata");
  if (!strata.is_array() || strata.size() != 2)
    throw ValidationError("document: 'strata' must list exactly two strata");
  gp.strata[0] = parse_stratum(strata[0], gp.n, gp.k1, gp.coords, 0);
  gp.strata[1] = parse_stratum(strata[1], gp.n, gp.k2, gp.coords, 1);

  // omega at the base point must be skew (as entries) and nonsingular.
  Matrix raw(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) raw(i, j) = eval(gp.omega[i][j], gp.coords, gp.base_point);
  double scale = std::max(1.0, raw.norm());
  if ((raw + raw.transpose()).norm() > 1e-9 * scale)
    throw ValidationError("omega is not skew-symmetric at the base point");
  if (numerical_rank(raw, tol) != d)
    throw ValidationError("omega is singular at the base point");

  for (int i = 0; i < 2; ++i) {
    const StratumGerm& st = gp.strata[i];
    const std::string where = "stratum " + std::to_string(i + 1);
    if (st.kind == StratumGerm::Kind::Parametric) {
      Vector at0 = stratum_value(st, Vector::Zero(st.dim));
      if ((at0 - gp.base_point).norm() > 1e-9 * (1.0 + gp.base_point.norm()))
        throw ValidationError(where + ": parametric map does not send 0 to the base point");
      if (numerical_rank(stratum_jacobian(st, Vector::Zero(st.dim)), tol) != st.dim)
        throw ValidationError(where + ": parametric Jacobian rank deficient at 0");
    } else {
      Vector f = stratum_value(st, gp.base_point);
      if (f.norm() > 1e-9 * (1.0 + gp.base_point.norm()))
        throw ValidationError(where + ": implicit equations do not vanish at the base point");
      if (numerical_rank(stratum_jacobian(st, gp.base_point), tol) != d - st.dim)
        throw ValidationError(where + ": implicit Jacobian rank deficient at the base point");
    }
  }

  gp.closedness_residual = closedness_residual_at(gp);
  gp.closedness_warning = gp.closedness_residual > 1e-8 * scale;
  return gp;
}

GermPair load_germ_pair_file(const std::string& path, const ToleranceConfig& tol) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid JSON in " + path + ": " + e.what());
  }
  return load_germ_pair(doc, tol);
}

nlohmann::json germ_pair_to_doc(const GermPair& gp) {
  nlohmann::json doc;
  doc["n"] = gp.n;
  if (gp.equal_dims()) {
    doc["k"] = gp.k1;
  } else {
    doc["k1"] = gp.k1;
    doc["k2"] = gp.k2;
  }
  doc["coords"] = gp.coords.names;
  std::vector<double> base(gp.base_point.data(), gp.base_point.data() + gp.base_point.size());
  doc["base_point"] = base;
  nlohmann::json om = nlohmann::json::array();
  for (const auto& row : gp.omega) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& e : row) r.push_back(to_string(e));
    om.push_back(r);
  }
  doc["omega"] = om;
  nlohmann::json strata = nlohmann::json::array();
  for (const auto& st : gp.strata) {
    nlohmann::json s;
    s["kind"] = st.kind == StratumGerm::Kind::Parametric ? "parametric" : "implicit";
    nlohmann::json exprs = nlohmann::json::array();
    for (const auto& e : st.exprs) exprs.push_back(to_string(e));
    s["exprs"] = exprs;
    s["vars"] = st.vars.names;
    strata.push_back(s);
  }
  doc["strata"] = strata;
  return doc;
}

GermPair germ_pair_from_linear(const Matrix& mu, const Subspace& u1, const Subspace& u2) {
  const int d = u1.ambient_dim;
  if (d % 2 != 0 || mu.rows() != d || u2.ambient_dim != d)
    throw DimensionMismatch("germ_pair_from_linear: inconsistent dimensions");
  GermPair gp;
  gp.n = d / 2;
  gp.k1 = u1.dim();
  gp.k2 = u2.dim();
  if (gp.k1 > gp.k2) throw DimensionMismatch("germ_pair_from_linear: expects dim u1 <= dim u2");
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("c" + std::to_string(i + 1));
  gp.coords = CoordFrame(names);
  gp.base_point = Vector::Zero(d);
  gp.omega.resize(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gp.omega[i].push_back(make_number(mu(i, j)));
  for (int si = 0; si < 2; ++si) {
    const Subspace& u = si == 0 ? u1 : u2;
    StratumGerm st;
    st.kind = StratumGerm::Kind::Parametric;
    st.dim = u.dim();
    std::vector<std::string> params;
    for (int j = 0; j < u.dim(); ++j) params.push_back("t" + std::to_string(j + 1));
    st.vars = CoordFrame(params);
    for (int i = 0; i < d; ++i) {
      ExprPtr sum = make_number(0.0);
      for (int j = 0; j < u.dim(); ++j) {
        if (u.basis(i, j) == 0.0) continue;
        ExprPtr term = make_mul(make_number(u.basis(i, j)), make_var(params[j]));
        sum = is_constant_zero(sum) ? term : make_add(sum, term);
      }
      st.exprs.push_back(sum);
    }
    gp.strata[si] = st;
  }
  return gp;
}

}  // namespace symgerm
