#include "symgerm/normal_forms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symgerm {

int NormalFormSpec::s() const {
  switch (tag) {
    case Case::K1:
    case Case::K2nMinus1:
      return 0;
    case Case::KLeNS1:
    case Case::SingleLambdaHigh:
      return 1;
    case Case::KLeN:
      return k / 2;
    case Case::Functional:
      return (2 * n - k) / 2;
  }
  return 0;
}

NormalFormSpec::Case nf_case_from_string(const std::string& name) {
  if (name == "k1") return NormalFormSpec::Case::K1;
  if (name == "k-le-n-s1") return NormalFormSpec::Case::KLeNS1;
  if (name == "k-le-n") return NormalFormSpec::Case::KLeN;
  if (name == "functional") return NormalFormSpec::Case::Functional;
  if (name == "single-lambda-high") return NormalFormSpec::Case::SingleLambdaHigh;
  if (name == "k-2n-1") return NormalFormSpec::Case::K2nMinus1;
  throw InvalidSpec("unknown normal-form case '" + name + "'");
}

const char* to_string(NormalFormSpec::Case c) {
  switch (c) {
    case NormalFormSpec::Case::K1:
      return "k1";
    case NormalFormSpec::Case::KLeNS1:
      return "k-le-n-s1";
    case NormalFormSpec::Case::KLeN:
      return "k-le-n";
    case NormalFormSpec::Case::Functional:
      return "functional";
    case NormalFormSpec::Case::SingleLambdaHigh:
      return "single-lambda-high";
    case NormalFormSpec::Case::K2nMinus1:
      return "k-2n-1";
  }
  return "?";
}

NormalFormSpec nf_spec_from_json(const nlohmann::json& doc) {
  NormalFormSpec spec;
  if (!doc.contains("n") || !doc.contains("case"))
    throw InvalidSpec("normal-form spec: missing 'n' or 'case'");
  spec.n = doc.at("n").get<int>();
  if (doc.contains("k")) {
    spec.k = doc.at("k").get<int>();
  } else if (doc.contains("k1") && doc.contains("k2")) {
    if (doc.at("k1").get<int>() != doc.at("k2").get<int>())
      throw InvalidSpec("normal-form spec: no model rows exist for unequal stratum dimensions");
    spec.k = doc.at("k1").get<int>();
  } else {
    throw InvalidSpec("normal-form spec: missing 'k'");
  }
  spec.tag = nf_case_from_string(doc.at("case").get<std::string>());
  if (doc.contains("lambdas")) {
    for (const auto& item : doc.at("lambdas")) {
      if (item.is_number()) {
        spec.lambdas.emplace_back(item.get<double>(), 0.0);
      } else if (item.is_array() && item.size() == 2) {
        spec.lambdas.emplace_back(item[0].get<double>(), item[1].get<double>());
      } else {
        throw InvalidSpec("normal-form spec: lambdas must be numbers or [re, im] pairs");
      }
    }
  }
  if (doc.contains("hamiltonians"))
    spec.hamiltonians = doc.at("hamiltonians").get<std::vector<std::string>>();
  validate(spec);
  return spec;
}

namespace {

// Partition the payload into real slots and adjacent conjugate-pair slots.
struct Block {
  bool complex = false;
  double re = 0.0, im = 0.0;  // im > 0 for complex blocks
};

std::vector<Block> payload_blocks(const ComplexMultiset& lambdas) {
  std::vector<Block> blocks;
  std::vector<bool> used(lambdas.size(), false);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const Complex& l = lambdas[i];
    if (std::abs(l) < 1e-12) throw InvalidSpec("characteristic numbers must be nonzero");
    if (std::abs(l.imag()) <= 1e-12 * (1.0 + std::abs(l.real()))) {
      // The model form has Pfaffian proportional to 1/lambda - 1 on the
      // corresponding block, so 1 is as forbidden as 0.
      if (std::abs(l.real() - 1.0) < 1e-9)
        throw InvalidSpec("characteristic number 1 makes the model form degenerate");
      blocks.push_back({false, l.real(), 0.0});
      continue;
    }
    std::size_t mate = lambdas.size();
    double best = 0.0;
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      if (used[j]) continue;
      double dist = std::abs(std::conj(l) - lambdas[j]);
      if (mate == lambdas.size() || dist < best) {
        mate = j;
        best = dist;
      }
    }
    if (mate == lambdas.size() || best > 1e-9 * (1.0 + std::abs(l)))
      throw InvalidSpec("non-real characteristic number without its conjugate partner");
    used[mate] = true;
    blocks.push_back({true, l.real(), std::abs(l.imag())});
  }
  return blocks;
}

std::vector<std::string> table_coords(int n, int m) {
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < m; ++i) names.push_back("y" + std::to_string(i + 1));
  for (int i = 0; i < n - m; ++i) names.push_back("u" + std::to_string(i + 1));
  for (int i = 0; i < n - m; ++i) names.push_back("v" + std::to_string(i + 1));
  return names;
}

}  // namespace

void validate(const NormalFormSpec& spec) {
  const int n = spec.n, k = spec.k;
  if (n < 1) throw InvalidSpec("n must be positive");
  auto dims_fail = [&](const std::string& need) {
    std::ostringstream out;
    out << "case '" << to_string(spec.tag) << "' needs " << need << ", got k=" << k
        << ", n=" << n;
    throw InvalidSpec(out.str());
  };
  switch (spec.tag) {
    case NormalFormSpec::Case::K1:
      if (k != 1) dims_fail("k = 1");
      break;
    case NormalFormSpec::Case::K2nMinus1:
      if (k != 2 * n - 1) dims_fail("k = 2n-1");
      break;
    case NormalFormSpec::Case::KLeNS1:
      if ((k != 2 && k != 3) || k > n) dims_fail("k in {2, 3}, k <= n");
      break;
    case NormalFormSpec::Case::KLeN:
      if (k < 2 || k > n) dims_fail("2 <= k <= n");
      break;
    case NormalFormSpec::Case::Functional:
      if (k <= n || k > 2 * n - 2) dims_fail("n < k <= 2n-2");
      break;
    case NormalFormSpec::Case::SingleLambdaHigh:
      if (k <= n || (k != 2 * n - 2 && k != 2 * n - 3)) dims_fail("n < k in {2n-3, 2n-2}");
      break;
  }
  const int s = spec.s();
  if (spec.tag == NormalFormSpec::Case::Functional) {
    if (!spec.lambdas.empty())
      throw InvalidSpec("the functional case takes coefficient functions, not numbers");
    if (static_cast<int>(spec.hamiltonians.size()) != s)
      throw InvalidSpec("expected " + std::to_string(s) + " coefficient functions, got " +
                        std::to_string(spec.hamiltonians.size()));
    auto names = table_coords(n, 2 * n - k);
    std::map<std::string, bool> uv;
    for (const auto& nm : names)
      if (nm[0] == 'u' || nm[0] == 'v') uv[nm] = true;
    CoordFrame frame(names);
    for (const auto& text : spec.hamiltonians) {
      ExprPtr h = parse_expression(text);
      std::vector<std::string> used;
      collect_vars(h, used);
      for (const auto& nm : used)
        if (!uv.count(nm))
          throw InvalidSpec("coefficient function uses '" + nm + "', allowed variables are u, v");
      double at0 = eval(h, frame, Vector::Zero(2 * n));
      if (std::abs(at0) < 1e-12)
        throw InvalidSpec("coefficient function vanishes at the base point");
      if (std::abs(at0 - 1.0) < 1e-9)
        throw InvalidSpec("coefficient function equals 1 at the base point, "
                          "which makes the model form degenerate there");
    }
    return;
  }
  if (!spec.hamiltonians.empty())
    throw InvalidSpec("coefficient functions are only valid in the functional case");
  if (static_cast<int>(spec.lambdas.size()) != s)
    throw InvalidSpec("expected " + std::to_string(s) + " characteristic numbers, got " +
                      std::to_string(spec.lambdas.size()));
  auto blocks = payload_blocks(spec.lambdas);
  if (s == 1 && !blocks.empty() && blocks[0].complex)
    throw InvalidSpec("a single characteristic number must be real");
}

GermPair synthesize(const NormalFormSpec& spec) {
  validate(spec);
  const int n = spec.n, k = spec.k, d = 2 * n;
  const bool high = k > n;
  const int m = high ? 2 * n - k : k;  // x and y each have m components
  const int s = spec.s();

  GermPair gp;
  gp.n = n;
  gp.k1 = gp.k2 = k;
  gp.coords = CoordFrame(table_coords(n, m));
  gp.base_point = Vector::Zero(d);
  gp.omega.resize(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gp.omega[i].push_back(make_number(0.0));

  auto set_const = [&](int i, int j, double v) {
    gp.omega[i][j] = make_number(v);
    gp.omega[j][i] = make_number(-v);
  };
  const int x0 = 0, y0 = m, u0 = 2 * m, v0 = 2 * m + (n - m);
  for (int i = 0; i < m; ++i) set_const(x0 + i, y0 + i, 1.0);
  for (int i = 0; i < n - m; ++i) set_const(u0 + i, v0 + i, 1.0);

  if (spec.tag == NormalFormSpec::Case::Functional) {
    for (int i = 0; i < s; ++i) {
      set_const(x0 + 2 * i, x0 + 2 * i + 1, 1.0);
      ExprPtr h = parse_expression(spec.hamiltonians[i]);
      gp.omega[y0 + 2 * i][y0 + 2 * i + 1] = make_div(make_number(1.0), h);
      gp.omega[y0 + 2 * i + 1][y0 + 2 * i] = make_div(make_number(-1.0), h);
    }
  } else {
    int slot = 0;
    for (const Block& b : payload_blocks(spec.lambdas)) {
      set_const(x0 + 2 * slot, x0 + 2 * slot + 1, 1.0);
      if (!b.complex) {
        set_const(y0 + 2 * slot, y0 + 2 * slot + 1, 1.0 / b.re);
        slot += 1;
        continue;
      }
      set_const(x0 + 2 * slot + 2, x0 + 2 * slot + 3, 1.0);
      // Real model of a conjugate pair: the y-block Gram is 2 B^-1 for the
      // skew B whose quarter pencil product has spectrum {a+-bi} twice.
      const double a = b.re, bb = b.im;
      Matrix bm(4, 4);
      bm << 0, -2 * a, 0, 2 * bb,
            2 * a, 0, 2 * bb, 0,
            0, -2 * bb, 0, -2 * a,
            -2 * bb, 0, 2 * a, 0;
      Matrix gy = 2.0 * bm.inverse();
      for (int p = 0; p < 4; ++p)
        for (int q = p + 1; q < 4; ++q) set_const(y0 + 2 * slot + p, y0 + 2 * slot + q, gy(p, q));
      slot += 2;
    }
  }

  for (int si = 0; si < 2; ++si) {
    StratumGerm st;
    st.kind = StratumGerm::Kind::Implicit;
    st.dim = k;
    st.vars = gp.coords;
    const int z0 = si == 0 ? y0 : x0;  // S1: y = 0, S2: x = 0
    for (int i = 0; i < m; ++i) st.exprs.push_back(make_var(gp.coords.names[z0 + i]));
    if (!high)
      for (int i = u0; i < d; ++i) st.exprs.push_back(make_var(gp.coords.names[i]));
    gp.strata[si] = st;
  }

  // Round-trip through the document form so synthesized pairs carry the
  // same validation and closedness diagnostics as ingested ones.
  return load_germ_pair(germ_pair_to_doc(gp), ToleranceConfig{});
}

namespace {

std::vector<std::string> required_conditions(NormalFormSpec::Case tag) {
  switch (tag) {
    case NormalFormSpec::Case::K1:
      return {"G2", "G3"};
    case NormalFormSpec::Case::K2nMinus1:
      return {"G1", "G3"};
    case NormalFormSpec::Case::KLeNS1:
    case NormalFormSpec::Case::SingleLambdaHigh:
      return {"G1", "G2", "G3", "G4", "G5"};
    case NormalFormSpec::Case::KLeN:
    case NormalFormSpec::Case::Functional:
      return {"G1", "G2", "G3", "G4", "G5", "G6"};
  }
  return {};
}

// Greedy nearest matching; returns per-pair distances or nullopt on size
// mismatch.
std::optional<std::vector<double>> match_residuals(const ComplexMultiset& want,
                                                   ComplexMultiset have) {
  if (want.size() != have.size()) return std::nullopt;
  std::vector<double> out;
  for (const Complex& w : want) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < have.size(); ++j)
      if (std::abs(have[j] - w) < std::abs(have[best] - w)) best = j;
    out.push_back(std::abs(have[best] - w));
    have.erase(have.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

}  // namespace

RoundtripReport roundtrip_verify(const NormalFormSpec& spec, const ToleranceConfig& tol) {
  RoundtripReport report;
  report.germ = synthesize(spec);
  const GermPair& gp = report.germ;

  GenericityReport rep = check_genericity(gp, gp.base_point, tol);
  if (auto f = rep.first_failure(required_conditions(spec.tag)))
    throw RoundtripFailure("synthesized form fails its own genericity condition " + *f);

  auto note = [&](const std::string& what, double r) {
    report.residuals[what] = r;
    report.max_residual = std::max(report.max_residual, r);
  };

  ReducedLinearization rl = reduce(linearize(gp, gp.base_point, tol), Dims(gp.k1), tol);
  if (rl.s != spec.s())
    throw RoundtripFailure("recovered s = " + std::to_string(rl.s) + ", expected " +
                           std::to_string(spec.s()));
  report.recovered = characteristic_numbers(rl, tol).collapsed;

  if (spec.tag == NormalFormSpec::Case::Functional) {
    CoordFrame frame = gp.coords;
    std::vector<ExprPtr> hs;
    ComplexMultiset want0;
    for (const auto& text : spec.hamiltonians) {
      hs.push_back(parse_expression(text));
      want0.emplace_back(eval(hs.back(), frame, gp.base_point), 0.0);
    }
    QChart chart(gp, tol);
    report.field = sample_hamiltonians(gp, chart, GridSpec{}, tol);
    auto base_res = match_residuals(want0, ComplexMultiset(report.field->base_values.begin(),
                                                           report.field->base_values.end()));
    if (!base_res) throw RoundtripFailure("base values: branch count differs from payload");
    for (std::size_t i = 0; i < base_res->size(); ++i)
      note("base_value_" + std::to_string(i + 1), (*base_res)[i]);

    double worst = 0.0;
    for (std::size_t g = 0; g < report.field->params.size(); ++g) {
      if (std::find(report.field->excluded.begin(), report.field->excluded.end(),
                    static_cast<int>(g)) != report.field->excluded.end())
        continue;
      Vector ambient = chart.map(report.field->params[g]).ambient;
      ComplexMultiset want;
      for (const auto& h : hs) want.emplace_back(eval(h, frame, ambient), 0.0);
      auto res = match_residuals(want, report.field->branches[g]);
      if (!res) throw RoundtripFailure("sampled field: branch count differs from payload");
      for (double r : *res) worst = std::max(worst, r);
    }
    note("field", worst);
  } else {
    auto res = match_residuals(spec.lambdas, report.recovered);
    if (!res)
      throw RoundtripFailure("recovered multiset size differs from payload");
    for (std::size_t i = 0; i < res->size(); ++i)
      note("lambda_" + std::to_string(i + 1), (*res)[i]);
  }

  for (const auto& [what, r] : report.residuals)
    if (r > tol.eig_pair_tol)
      throw RoundtripFailure(what + ": residual " + std::to_string(r) + " exceeds tolerance");
  return report;
}

}  // namespace symgerm
