#include <doctest.h>

#include "symgerm/decide.hpp"
#include "symgerm/normal_forms.hpp"
#include "symgerm/random_gen.hpp"

using namespace symgerm;

namespace {

GermPair model(int n, int k, NormalFormSpec::Case tag, ComplexMultiset lambdas = {},
               std::vector<std::string> hs = {}) {
  NormalFormSpec spec;
  spec.n = n;
  spec.k = k;
  spec.tag = tag;
  spec.lambdas = std::move(lambdas);
  spec.hamiltonians = std::move(hs);
  return synthesize(spec);
}

GermPair random_pair(int n, const Dims& dims, RngEngine& rng, const ToleranceConfig& tol) {
  LinearTuple lt = random_generic_tuple(n, dims, rng, tol);
  return germ_pair_from_linear(lt.mu, lt.u1, lt.u2);
}

}  // namespace

TEST_CASE("zero-invariant regimes are always equivalent") {
  ToleranceConfig tol;
  RngEngine rng(41);

  Verdict v = decide_equivalence(random_pair(2, Dims(1), rng, tol),
                                 random_pair(2, Dims(1), rng, tol), tol);
  CHECK(v.status == Verdict::Status::Equivalent);
  CHECK(v.rule == "A1");

  v = decide_equivalence(random_pair(2, Dims(3), rng, tol), random_pair(2, Dims(3), rng, tol),
                         tol);
  CHECK(v.status == Verdict::Status::Equivalent);
  CHECK(v.rule == "A2");
}

TEST_CASE("low-dimension regime compares the collapsed multisets") {
  ToleranceConfig tol;
  GermPair g2 = model(2, 2, NormalFormSpec::Case::KLeNS1, {2.0});
  GermPair g3 = model(2, 2, NormalFormSpec::Case::KLeNS1, {3.0});

  Verdict v = decide_equivalence(g2, g3, tol);
  CHECK(v.status == Verdict::Status::NotEquivalent);
  CHECK(v.rule == "B");

  v = decide_equivalence(g2, g2, tol);
  CHECK(v.status == Verdict::Status::Equivalent);
  CHECK(v.rule == "B");
}

TEST_CASE("symplectic images stay equivalent") {
  ToleranceConfig tol;
  RngEngine rng(42);
  LinearTuple lt = random_generic_tuple(3, Dims(3), rng, tol);
  Matrix phi = random_symplectic(lt.mu, rng);
  GermPair g1 = germ_pair_from_linear(lt.mu, lt.u1, lt.u2);
  GermPair g2 = germ_pair_from_linear(lt.mu, Subspace(6, phi * lt.u1.basis),
                                      Subspace(6, phi * lt.u2.basis));
  Verdict v = decide_equivalence(g1, g2, tol);
  CHECK(v.status == Verdict::Status::Equivalent);
  CHECK(v.rule == "B");
}

TEST_CASE("unequal dimensions use the primed rule") {
  ToleranceConfig tol;
  RngEngine rng(43);
  LinearTuple lt = random_generic_tuple(3, Dims(2, 4), rng, tol);
  Matrix phi = random_symplectic(lt.mu, rng);
  GermPair g1 = germ_pair_from_linear(lt.mu, lt.u1, lt.u2);
  GermPair g2 = germ_pair_from_linear(lt.mu, Subspace(6, phi * lt.u1.basis),
                                      Subspace(6, phi * lt.u2.basis));
  Verdict v = decide_equivalence(g1, g2, tol);
  CHECK(v.status == Verdict::Status::Equivalent);
  CHECK(v.rule == "B'");
}

TEST_CASE("single invariant above the middle dimension: field comparison") {
  ToleranceConfig tol;
  GermPair a = model(3, 4, NormalFormSpec::Case::Functional, {}, {"2 + u1"});
  GermPair b = model(3, 4, NormalFormSpec::Case::Functional, {}, {"2 + v1"});
  GermPair c = model(3, 4, NormalFormSpec::Case::Functional, {}, {"1.5 + u1"});

  Verdict v = decide_equivalence(a, b, tol);
  CHECK(v.status == Verdict::Status::Equivalent);
  CHECK(v.rule == "3.2");

  v = decide_equivalence(a, c, tol);
  CHECK(v.status == Verdict::Status::NotEquivalent);
  CHECK(v.rule == "3.2");
}

TEST_CASE("constant field fails G7 and blocks the verdict") {
  ToleranceConfig tol;
  GermPair a = model(3, 4, NormalFormSpec::Case::SingleLambdaHigh, {2.0});
  Verdict v = decide_equivalence(a, a, tol);
  CHECK(v.status == Verdict::Status::Undetermined);
  CHECK(v.reason.find("G7") != std::string::npos);
}

TEST_CASE("functional moduli regime") {
  ToleranceConfig tol;
  GermPair a = model(5, 6, NormalFormSpec::Case::Functional, {}, {"2 + u1", "4 - v1"});
  GermPair b = model(5, 6, NormalFormSpec::Case::Functional, {}, {"2 - v1", "4 + u1"});
  GermPair c = model(5, 6, NormalFormSpec::Case::Functional, {}, {"2 + u1", "5 - v1"});

  Verdict v = decide_equivalence(a, b, tol);
  CHECK(v.status == Verdict::Status::Undetermined);
  CHECK(v.reason.find("functional moduli") != std::string::npos);
  CHECK(v.field1.has_value());
  CHECK(v.field2.has_value());

  v = decide_equivalence(a, c, tol);
  CHECK(v.status == Verdict::Status::NotEquivalent);
  CHECK(v.rule == "C");
}

TEST_CASE("dimension mismatch is an error") {
  ToleranceConfig tol;
  GermPair a = model(2, 2, NormalFormSpec::Case::KLeNS1, {2.0});
  GermPair b = model(3, 3, NormalFormSpec::Case::KLeN, {2.0});
  CHECK_THROWS_AS(decide_equivalence(a, b, tol), DimensionMismatch);
}

TEST_CASE("genericity failure yields an undetermined verdict naming the condition") {
  ToleranceConfig tol;
  Matrix mu = Matrix::Zero(4, 4);
  mu(0, 1) = 1.0;
  mu(1, 0) = -1.0;
  mu(2, 3) = 1.0;
  mu(3, 2) = -1.0;
  Matrix b = Matrix::Zero(4, 2);
  b(0, 0) = 1.0;
  b(1, 1) = 1.0;
  Subspace u(4, b);
  GermPair gp = germ_pair_from_linear(mu, u, u);  // coincident tangents
  Verdict v = decide_equivalence(gp, gp, tol);
  CHECK(v.status == Verdict::Status::Undetermined);
  CHECK(v.reason.find("G") != std::string::npos);
}
