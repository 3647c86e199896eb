#include <doctest.h>

#include "symgerm/normal_forms.hpp"

using namespace symgerm;
using nlohmann::json;

namespace {

NormalFormSpec spec_of(int n, int k, NormalFormSpec::Case tag, ComplexMultiset lambdas = {},
                       std::vector<std::string> hs = {}) {
  NormalFormSpec spec;
  spec.n = n;
  spec.k = k;
  spec.tag = tag;
  spec.lambdas = std::move(lambdas);
  spec.hamiltonians = std::move(hs);
  return spec;
}

}  // namespace

TEST_CASE("spec parsing from JSON") {
  NormalFormSpec spec = nf_spec_from_json(
      json{{"case", "k-le-n"}, {"n", 4}, {"k", 4}, {"lambdas", {2.0, 3.0}}});
  CHECK(spec.tag == NormalFormSpec::Case::KLeN);
  CHECK(spec.s() == 2);
  CHECK(spec.lambdas == ComplexMultiset{2.0, 3.0});

  spec = nf_spec_from_json(json{
      {"case", "k-le-n"}, {"n", 4}, {"k", 4}, {"lambdas", {{1.0, 1.0}, {1.0, -1.0}}}});
  CHECK(spec.lambdas == ComplexMultiset{Complex(1, 1), Complex(1, -1)});

  CHECK_THROWS_AS(nf_spec_from_json(json{{"case", "no_such_row"}, {"n", 2}, {"k", 2}}),
                  InvalidSpec);
}

TEST_CASE("validation rejects bad payloads") {
  CHECK_THROWS_AS(validate(spec_of(4, 4, NormalFormSpec::Case::KLeN, {0.0, 2.0})), InvalidSpec);
  CHECK_THROWS_AS(validate(spec_of(4, 4, NormalFormSpec::Case::KLeN, {1.0, 2.0})), InvalidSpec);
  CHECK_THROWS_AS(validate(spec_of(4, 4, NormalFormSpec::Case::KLeN, {Complex(1, 1), 2.0})),
                  InvalidSpec);  // lone complex value
  CHECK_THROWS_AS(validate(spec_of(4, 4, NormalFormSpec::Case::KLeN, {2.0})), InvalidSpec);
  CHECK_THROWS_AS(validate(spec_of(2, 2, NormalFormSpec::Case::K1, {})), InvalidSpec);
  CHECK_THROWS_AS(validate(spec_of(2, 2, NormalFormSpec::Case::Functional, {}, {"2 + u1"})),
                  InvalidSpec);  // needs k > n
  CHECK_THROWS_AS(validate(spec_of(3, 4, NormalFormSpec::Case::Functional, {}, {"1 + u1"})),
                  InvalidSpec);  // value 1 at the base point degenerates the form
  CHECK_THROWS_AS(validate(spec_of(3, 4, NormalFormSpec::Case::Functional, {}, {"u1"})),
                  InvalidSpec);  // vanishes at the base point
  CHECK_THROWS_AS(validate(spec_of(3, 4, NormalFormSpec::Case::Functional, {}, {"2 + x1"})),
                  InvalidSpec);  // x is not an allowed variable
  CHECK_NOTHROW(validate(spec_of(3, 4, NormalFormSpec::Case::Functional, {}, {"2 + u1"})));
  CHECK_NOTHROW(validate(spec_of(2, 1, NormalFormSpec::Case::K1, {})));
}

TEST_CASE("synthesized k = n = 2 form matches the model") {
  GermPair gp = synthesize(spec_of(2, 2, NormalFormSpec::Case::KLeNS1, {5.0}));
  Matrix mu = omega_at(gp, gp.base_point);
  CHECK(mu(0, 1) == doctest::Approx(1.0));
  CHECK(mu(2, 3) == doctest::Approx(0.2));
  CHECK(mu(0, 2) == doctest::Approx(1.0));
  CHECK(mu(1, 3) == doctest::Approx(1.0));
  ToleranceConfig tol;
  Subspace t1 = stratum_tangent(gp, 0, gp.base_point, tol);
  Subspace t2 = stratum_tangent(gp, 1, gp.base_point, tol);
  CHECK(t1.dim() == 2);
  CHECK(t2.dim() == 2);
  CHECK(subspace_intersect(t1, t2, tol).dim() == 0);
}

TEST_CASE("round trips across the rows") {
  ToleranceConfig tol;

  RoundtripReport r = roundtrip_verify(spec_of(3, 1, NormalFormSpec::Case::K1), tol);
  CHECK(r.recovered.empty());
  CHECK(r.max_residual < 1e-10);

  r = roundtrip_verify(spec_of(3, 5, NormalFormSpec::Case::K2nMinus1), tol);
  CHECK(r.recovered.empty());

  r = roundtrip_verify(spec_of(2, 2, NormalFormSpec::Case::KLeNS1, {2.0}), tol);
  CHECK(multiset_equal(r.recovered, {2.0}, tol));
  CHECK(r.max_residual < 1e-10);

  r = roundtrip_verify(spec_of(4, 4, NormalFormSpec::Case::KLeN, {2.0, 3.0}), tol);
  CHECK(multiset_equal(r.recovered, {2.0, 3.0}, tol));
  CHECK(r.max_residual < 1e-10);

  r = roundtrip_verify(
      spec_of(4, 4, NormalFormSpec::Case::KLeN, {Complex(1, 1), Complex(1, -1)}), tol);
  CHECK(multiset_equal(r.recovered, {Complex(1, 1), Complex(1, -1)}, tol));
  CHECK(r.max_residual < 1e-8);

  r = roundtrip_verify(spec_of(3, 4, NormalFormSpec::Case::SingleLambdaHigh, {2.0}), tol);
  CHECK(multiset_equal(r.recovered, {2.0}, tol));

  r = roundtrip_verify(
      spec_of(5, 6, NormalFormSpec::Case::Functional, {}, {"2 + u1", "4 - v1"}), tol);
  REQUIRE(r.field.has_value());
  CHECK(r.field->s == 2);
  CHECK(r.max_residual < 1e-6);
}

TEST_CASE("round trip fails loudly on a broken payload") {
  // bypass validate() by corrupting after construction is impossible through the API;
  // instead check that synthesize itself refuses a degenerate payload
  CHECK_THROWS_AS(synthesize(spec_of(2, 2, NormalFormSpec::Case::KLeNS1, {1.0})), InvalidSpec);
  CHECK_THROWS_AS(synthesize(spec_of(2, 2, NormalFormSpec::Case::KLeNS1, {0.0})), InvalidSpec);
}

TEST_CASE("synthesized documents reload cleanly") {
  ToleranceConfig tol;
  GermPair gp = synthesize(spec_of(4, 4, NormalFormSpec::Case::KLeN, {2.0, 3.0}));
  GermPair back = load_germ_pair(germ_pair_to_doc(gp), tol);
  CHECK(back.n == 4);
  CHECK(back.k1 == 4);
  CHECK((omega_at(back, back.base_point) - omega_at(gp, gp.base_point)).norm() < 1e-14);
}
