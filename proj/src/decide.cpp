#include "symgerm/decide.hpp"

#include <sstream>

namespace symgerm {

const char* to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Equivalent:
      return "Equivalent";
    case Verdict::Status::NotEquivalent:
      return "NotEquivalent";
    case Verdict::Status::Undetermined:
      return "Undetermined";
  }
  return "Undetermined";
}

namespace {

std::string multiset_to_string(const ComplexMultiset& m) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out << ", ";
    out << m[i].real();
    if (m[i].imag() != 0.0) out << (m[i].imag() > 0 ? "+" : "") << m[i].imag() << "i";
  }
  out << "}";
  return out.str();
}

Verdict undetermined(std::string reason) {
  Verdict v;
  v.status = Verdict::Status::Undetermined;
  v.reason = std::move(reason);
  return v;
}

}  // namespace

Verdict decide_equivalence(const GermPair& gp1, const GermPair& gp2, const ToleranceConfig& tol) {
  if (gp1.n != gp2.n || gp1.k1 != gp2.k1 || gp1.k2 != gp2.k2)
    throw DimensionMismatch("decide_equivalence: the germ pairs have different (n, dims)");
  const int n = gp1.n;
  const int d = 2 * n;
  const Dims dims(gp1.k1, gp1.k2);
  const int s = invariant_count(dims, n);
  const bool equal = dims.equal();
  const int k = dims.k1;

  GenericityReport rep1 = check_genericity(gp1, gp1.base_point, tol);
  GenericityReport rep2 = check_genericity(gp2, gp2.base_point, tol);

  auto require = [&](const std::vector<std::string>& keys) -> std::optional<Verdict> {
    if (auto f = rep1.first_failure(keys))
      return undetermined("genericity condition " + *f + " fails for the first germ pair");
    if (auto f = rep2.first_failure(keys))
      return undetermined("genericity condition " + *f + " fails for the second germ pair");
    return std::nullopt;
  };

  auto collapsed_at_base = [&](const GermPair& gp) {
    return characteristic_numbers(reduce(linearize(gp, gp.base_point, tol), dims, tol), tol)
        .collapsed;
  };

  // Zero-tuple regimes: every generic germ pair is equivalent.
  if ((equal && (k == 1 || k == d - 1)) || (!equal && (dims.k1 == 1 || dims.k2 == d - 1))) {
    std::vector<std::string> keys =
        equal ? std::vector<std::string>{"G1", "G2", "G3"}
              : std::vector<std::string>{"G1", "G2", "G3", "G4", "G5", "G8"};
    if (auto u = require(keys)) return *u;
    Verdict v;
    v.status = Verdict::Status::Equivalent;
    v.rule = equal ? (k == 1 ? "A1" : "A2") : "A'";
    return v;
  }

  // Finite-invariant regimes: the collapsed multiset decides.
  if ((equal && k <= n) || (!equal && dims.k1 + dims.k2 <= d)) {
    std::vector<std::string> keys = {"G1", "G2", "G3", "G4", "G5", "G6"};
    if (!equal) keys.push_back("G8");
    if (auto u = require(keys)) return *u;
    Verdict v;
    v.rule = equal ? "B" : "B'";
    try {
      ComplexMultiset m1 = collapsed_at_base(gp1);
      ComplexMultiset m2 = collapsed_at_base(gp2);
      v.details["characteristic_numbers_1"] = multiset_to_string(m1);
      v.details["characteristic_numbers_2"] = multiset_to_string(m2);
      v.status = multiset_equal(m1, m2, tol) ? Verdict::Status::Equivalent
                                             : Verdict::Status::NotEquivalent;
    } catch (const Error& e) {
      return undetermined(std::string("invariant computation failed: ") + e.what());
    }
    return v;
  }

  // k > n (or k1 + k2 > 2n): invariants live on the intersection manifold.
  std::vector<std::string> keys = {"G1", "G2", "G3", "G4", "G5"};
  if (s >= 2) keys.push_back("G6");
  if (!equal) keys.push_back("G8");
  if (auto u = require(keys)) return *u;

  Verdict v;
  GridSpec grid;
  try {
    QChart chart1(gp1, tol), chart2(gp2, tol);
    v.field1 = sample_hamiltonians(gp1, chart1, grid, tol);
    v.field2 = sample_hamiltonians(gp2, chart2, grid, tol);
  } catch (const Error& e) {
    return undetermined(std::string("Hamiltonian sampling failed: ") + e.what());
  }

  const bool single = equal && s == 1 && (k == d - 3 || k == d - 2);
  if (single) {
    G7Result g1 = check_G7(*v.field1, tol);
    G7Result g2 = check_G7(*v.field2, tol);
    if (!g1.holds || !g2.holds) {
      Verdict u = undetermined("genericity condition G7 fails for the " +
                               std::string(!g1.holds ? "first" : "second") + " germ pair");
      u.field1 = v.field1;
      u.field2 = v.field2;
      return u;
    }
    v.rule = "3.2";
    ComplexMultiset m1(v.field1->base_values.begin(), v.field1->base_values.end());
    ComplexMultiset m2(v.field2->base_values.begin(), v.field2->base_values.end());
    v.details["lambda_1"] = multiset_to_string(m1);
    v.details["lambda_2"] = multiset_to_string(m2);
    v.status = multiset_equal(m1, m2, tol) ? Verdict::Status::Equivalent
                                           : Verdict::Status::NotEquivalent;
    return v;
  }

  // Functional moduli: a base-point value mismatch soundly refutes
  // equivalence; agreement is not sufficient.
  ComplexMultiset m1(v.field1->base_values.begin(), v.field1->base_values.end());
  ComplexMultiset m2(v.field2->base_values.begin(), v.field2->base_values.end());
  v.details["base_values_1"] = multiset_to_string(m1);
  v.details["base_values_2"] = multiset_to_string(m2);
  if (!multiset_equal(m1, m2, tol)) {
    v.status = Verdict::Status::NotEquivalent;
    v.rule = equal ? "C" : "C'";
  } else {
    v.status = Verdict::Status::Undetermined;
    v.reason = "functional moduli: base-point invariants agree but the regime carries "
               "functional invariants beyond this decision procedure";
  }
  return v;
}

}  // namespace symgerm
