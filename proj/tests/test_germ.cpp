#include <doctest.h>

#include "symgerm/germ.hpp"
#include "symgerm/random_gen.hpp"

using namespace symgerm;
using nlohmann::json;

namespace {

json standard_doc_r4() {
  // (x1, y1, x2, y2) with the Darboux form; flat transversal strata
  return json{
      {"n", 2},
      {"k", 2},
      {"coords", {"x1", "y1", "x2", "y2"}},
      {"base_point", {0.0, 0.0, 0.0, 0.0}},
      {"omega",
       {{"0", "1", "0", "0"},
        {"-1", "0", "0", "0"},
        {"0", "0", "0", "1"},
        {"0", "0", "-1", "0"}}},
      {"strata",
       {{{"kind", "parametric"},
         {"exprs", {"t1", "0", "t2", "0"}},
         {"vars", {"t1", "t2"}}},
        {{"kind", "parametric"},
         {"exprs", {"0", "t1", "0", "t2"}},
         {"vars", {"t1", "t2"}}}}}};
}

}  // namespace

TEST_CASE("load a valid document") {
  ToleranceConfig tol;
  GermPair gp = load_germ_pair(standard_doc_r4(), tol);
  CHECK(gp.n == 2);
  CHECK(gp.k1 == 2);
  CHECK(gp.equal_dims());
  CHECK_FALSE(gp.closedness_warning);
  Matrix mu = omega_at(gp, gp.base_point);
  CHECK(mu(0, 1) == 1.0);
  CHECK(mu(1, 0) == -1.0);
  CHECK(numerical_rank(mu, tol) == 4);
}

TEST_CASE("validation failures") {
  ToleranceConfig tol;

  json bad = standard_doc_r4();
  bad["omega"][1][0] = "1";  // not skew
  CHECK_THROWS_AS(load_germ_pair(bad, tol), ValidationError);

  bad = standard_doc_r4();
  bad["strata"][0]["exprs"][0] = "t1 + 1";  // parametric map misses the base point
  CHECK_THROWS_AS(load_germ_pair(bad, tol), ValidationError);

  bad = standard_doc_r4();
  bad["omega"][0][1] = "0";
  bad["omega"][1][0] = "0";  // singular at the base point
  CHECK_THROWS_AS(load_germ_pair(bad, tol), ValidationError);

  bad = standard_doc_r4();
  bad.erase("base_point");
  CHECK_THROWS_AS(load_germ_pair(bad, tol), ValidationError);

  bad = standard_doc_r4();
  bad["k"] = 5;  // exceeds 2n - 1
  CHECK_THROWS_AS(load_germ_pair(bad, tol), ValidationError);
}

TEST_CASE("implicit stratum tangent: y = x^2 at the origin") {
  ToleranceConfig tol;
  json doc{{"n", 1},
           {"k", 1},
           {"coords", {"x", "y"}},
           {"base_point", {0.0, 0.0}},
           {"omega", json::array({json::array({"0", "1"}), json::array({"-1", "0"})})},
           {"strata",
            {{{"kind", "implicit"}, {"exprs", {"y - x^2"}}},
             {{"kind", "implicit"}, {"exprs", {"y - 2*x"}}}}}};
  GermPair gp = load_germ_pair(doc, tol);
  Subspace t = stratum_tangent(gp, 0, gp.base_point, tol);
  REQUIRE(t.dim() == 1);
  Matrix ex(2, 1);
  ex << 1.0, 0.0;
  CHECK(subspace_equal(t, Subspace(2, ex), tol));

  // on-curve point away from the base
  Vector q(2);
  q << 0.5, 0.25;
  Subspace tq = stratum_tangent(gp, 0, q, tol);
  Matrix dir(2, 1);
  dir << 1.0, 1.0;  // (1, 2x) at x = 1/2 up to scale
  CHECK(subspace_equal(tq, Subspace(2, dir), tol));

  Vector off(2);
  off << 0.5, 0.5;
  CHECK_THROWS_AS(stratum_tangent(gp, 0, off, tol), PointNotOnStratum);
}

TEST_CASE("serialization round trip") {
  ToleranceConfig tol;
  GermPair gp = load_germ_pair(standard_doc_r4(), tol);
  GermPair back = load_germ_pair(germ_pair_to_doc(gp), tol);
  CHECK(back.n == gp.n);
  CHECK(back.k1 == gp.k1);
  CHECK((omega_at(back, back.base_point) - omega_at(gp, gp.base_point)).norm() < 1e-14);
  CHECK(subspace_equal(stratum_tangent(back, 0, back.base_point, tol),
                       stratum_tangent(gp, 0, gp.base_point, tol), tol));
}

TEST_CASE("non-closed form is a warning, not an error") {
  ToleranceConfig tol;
  json doc = standard_doc_r4();
  doc["omega"][0][1] = "1 + x2";
  doc["omega"][1][0] = "-1 - x2";
  GermPair gp = load_germ_pair(doc, tol);
  CHECK(gp.closedness_warning);
  CHECK(gp.closedness_residual > 0.5);

  // position-dependent but closed: d(x1 dx1 wedge dy1 term) style coefficient in u-plane only
  doc = standard_doc_r4();
  doc["omega"][0][1] = "1 + x1";
  doc["omega"][1][0] = "-1 - x1";
  gp = load_germ_pair(doc, tol);
  CHECK_FALSE(gp.closedness_warning);
}

TEST_CASE("germ pair from linear data") {
  ToleranceConfig tol;
  RngEngine rng(21);
  Matrix mu = random_skew(6, rng, tol);
  Subspace u1 = random_subspace(6, 2, rng, tol);
  Subspace u2 = random_subspace(6, 3, rng, tol);
  GermPair gp = germ_pair_from_linear(mu, u1, u2);
  CHECK(gp.n == 3);
  CHECK(gp.k1 == 2);
  CHECK(gp.k2 == 3);
  CHECK((omega_at(gp, gp.base_point) - mu).norm() < 1e-13);
  CHECK(subspace_equal(stratum_tangent(gp, 0, gp.base_point, tol), u1, tol));
  CHECK(subspace_equal(stratum_tangent(gp, 1, gp.base_point, tol), u2, tol));
}
