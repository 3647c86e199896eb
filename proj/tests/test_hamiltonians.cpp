#include <doctest.h>

#include "symgerm/hamiltonians.hpp"
#include "symgerm/normal_forms.hpp"

using namespace symgerm;

namespace {

NormalFormSpec functional_spec(int n, int k, std::vector<std::string> hs) {
  NormalFormSpec spec;
  spec.n = n;
  spec.k = k;
  spec.tag = NormalFormSpec::Case::Functional;
  spec.hamiltonians = std::move(hs);
  return spec;
}

NormalFormSpec single_high_spec(int n, int k, double lambda) {
  NormalFormSpec spec;
  spec.n = n;
  spec.k = k;
  spec.tag = NormalFormSpec::Case::SingleLambdaHigh;
  spec.lambdas = {lambda};
  return spec;
}

int grid_index(const HamiltonianField& field, const Vector& target) {
  for (std::size_t i = 0; i < field.params.size(); ++i)
    if ((field.params[i] - target).norm() < 1e-12) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("Q chart of the k > n model") {
  ToleranceConfig tol;
  GermPair gp = synthesize(single_high_spec(3, 4, 2.0));
  QChart chart(gp, tol);
  CHECK(chart.dim_q() == 2);  // 2k - 2n
  CHECK(chart.anchor().norm() < 1e-14);
  QChart::Point p0 = chart.map(Vector::Zero(2));
  CHECK(p0.ambient.norm() < 1e-12);
  CHECK(p0.residual < 1e-12);
  Vector t(2);
  t << 0.1, -0.05;
  QChart::Point p = chart.map(t);
  CHECK(p.residual < 1e-12);
  CHECK(p.ambient.norm() > 0.05);
}

TEST_CASE("restricted form on Q in the functional model") {
  ToleranceConfig tol;
  GermPair gp = synthesize(functional_spec(3, 4, {"2 + u1"}));
  QChart chart(gp, tol);
  Matrix g = omega_Q(gp, chart, Vector::Zero(2), tol);
  Matrix expected(2, 2);
  expected << 0.0, 1.0, -1.0, 0.0;
  CHECK((g - expected).norm() < 1e-9);
}

TEST_CASE("wrong regime for k <= n") {
  ToleranceConfig tol;
  NormalFormSpec spec;
  spec.n = 2;
  spec.k = 2;
  spec.tag = NormalFormSpec::Case::KLeNS1;
  spec.lambdas = {2.0};
  GermPair gp = synthesize(spec);
  // the intersection is zero-dimensional below the middle dimension
  CHECK_THROWS_AS(QChart(gp, tol), WrongRegime);
}

TEST_CASE("sampled field recovers the coefficient function") {
  ToleranceConfig tol;
  GermPair gp = synthesize(functional_spec(3, 4, {"2 + u1"}));
  QChart chart(gp, tol);
  GridSpec grid;  // 5 points per axis, radius 0.2
  HamiltonianField field = sample_hamiltonians(gp, chart, grid, tol);
  CHECK(field.dim_q == 2);
  CHECK(field.s == 1);
  CHECK(field.params.size() == 25);
  REQUIRE(field.base_values.size() == 1);
  CHECK(std::abs(field.base_values[0] - Complex(2.0)) < 1e-8);

  Vector target(2);
  target << 0.1, 0.0;  // chart parameter along u1
  int idx = grid_index(field, target);
  REQUIRE(idx >= 0);
  CHECK(std::abs(field.branches[idx][0] - Complex(2.1)) < 1e-7);

  target << -0.2, 0.1;
  idx = grid_index(field, target);
  REQUIRE(idx >= 0);
  CHECK(std::abs(field.branches[idx][0] - Complex(1.8)) < 1e-7);
}

TEST_CASE("constant field from a numeric single-lambda model") {
  ToleranceConfig tol;
  GermPair gp = synthesize(single_high_spec(3, 4, 2.0));
  QChart chart(gp, tol);
  HamiltonianField field = sample_hamiltonians(gp, chart, GridSpec{}, tol);
  for (std::size_t i = 0; i < field.branches.size(); ++i) {
    bool excluded = false;
    for (int e : field.excluded) excluded = excluded || e == static_cast<int>(i);
    if (excluded) continue;
    CHECK(std::abs(field.branches[i][0] - Complex(2.0)) < 1e-7);
  }
}

TEST_CASE("G7 discrimination") {
  ToleranceConfig tol;
  GermPair varying = synthesize(functional_spec(3, 4, {"2 + u1"}));
  QChart chart1(varying, tol);
  HamiltonianField f1 = sample_hamiltonians(varying, chart1, GridSpec{}, tol);
  G7Result g7 = check_G7(f1, tol);
  CHECK(g7.holds);
  REQUIRE(g7.gradient.size() == 2);
  CHECK(std::abs(g7.gradient(0) - 1.0) < 1e-6);
  CHECK(std::abs(g7.gradient(1)) < 1e-6);

  GermPair constant = synthesize(single_high_spec(3, 4, 2.0));
  QChart chart2(constant, tol);
  HamiltonianField f2 = sample_hamiltonians(constant, chart2, GridSpec{}, tol);
  CHECK_FALSE(check_G7(f2, tol).holds);
}

TEST_CASE("G7 needs the s = 1 regime") {
  ToleranceConfig tol;
  GermPair gp = synthesize(functional_spec(5, 6, {"2 + u1", "4 - v1"}));
  QChart chart(gp, tol);
  HamiltonianField field = sample_hamiltonians(gp, chart, GridSpec{}, tol);
  CHECK(field.s == 2);
  CHECK_THROWS_AS(check_G7(field, tol), WrongRegime);
}

TEST_CASE("field serialization is deterministic") {
  ToleranceConfig tol;
  GermPair gp = synthesize(functional_spec(3, 4, {"2 + u1"}));
  std::string csv1, csv2, json1, json2;
  {
    QChart chart(gp, tol);
    HamiltonianField f = sample_hamiltonians(gp, chart, GridSpec{}, tol);
    csv1 = field_to_csv(f);
    json1 = field_to_json(f, tol).dump();
  }
  {
    QChart chart(gp, tol);
    HamiltonianField f = sample_hamiltonians(gp, chart, GridSpec{}, tol);
    csv2 = field_to_csv(f);
    json2 = field_to_json(f, tol).dump();
  }
  CHECK(csv1 == csv2);
  CHECK(json1 == json2);
  CHECK_FALSE(csv1.empty());
}
