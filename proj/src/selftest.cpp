#include "symgerm/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "symgerm/decide.hpp"
#include "symgerm/format.hpp"
#include "symgerm/normal_forms.hpp"
#include "symgerm/random_gen.hpp"

namespace symgerm {

namespace {

// Max distance over a greedy nearest-partner pairing; the even-multiplicity
// property says this stays at roundoff level.
double pairing_defect(ComplexMultiset values) {
  double worst = 0.0;
  while (values.size() >= 2) {
    Complex v = values.back();
    values.pop_back();
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j)
      if (std::abs(values[j] - v) < std::abs(values[best] - v)) best = j;
    worst = std::max(worst, std::abs(values[best] - v) / (1.0 + std::abs(v)));
    values.erase(values.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

std::vector<double> distinct_reals(int count, RngEngine& rng) {
  std::uniform_real_distribution<double> dist(0.1, 10.0);
  std::vector<double> out;
  while (static_cast<int>(out.size()) < count) {
    double v = dist(rng);
    bool clash = false;
    for (double w : out) clash = clash || std::abs(v - w) < 0.05;
    if (!clash) out.push_back(v);
  }
  return out;
}

}  // namespace

SelftestResult selftest(std::uint64_t seed) {
  RngEngine rng(seed);
  ToleranceConfig tol;
  std::ostringstream out;
  bool pass = true;
  out << "selftest seed " << seed << "\n";

  auto line = [&](const std::string& what, bool ok, const std::string& detail) {
    pass = pass && ok;
    out << (ok ? "ok   " : "FAIL ") << what << ": " << detail << "\n";
  };

  try {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      int n = 2 + i % 3;
      int k = 2 + i % (n - 1 > 0 ? n - 1 : 1);
      if (k > n) k = n;
      NormalFormSpec spec;
      spec.n = n;
      spec.k = k;
      spec.tag = NormalFormSpec::Case::KLeN;
      for (double v : distinct_reals(k / 2, rng)) spec.lambdas.emplace_back(v, 0.0);
      worst = std::max(worst, roundtrip_verify(spec, tol).max_residual);
    }
    line("roundtrip real lambdas", worst < 1e-8, "10 specs, max residual " + fmt_double(worst));
  } catch (const Error& e) {
    line("roundtrip real lambdas", false, e.what());
  }

  try {
    std::uniform_real_distribution<double> re(0.5, 3.0), im(0.3, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      NormalFormSpec spec;
      spec.n = 4;
      spec.k = 4;
      spec.tag = NormalFormSpec::Case::KLeN;
      double a = re(rng), b = im(rng);
      spec.lambdas.emplace_back(a, b);
      spec.lambdas.emplace_back(a, -b);
      worst = std::max(worst, roundtrip_verify(spec, tol).max_residual);
    }
    line("roundtrip conjugate pairs", worst < 1e-8, "4 specs, max residual " + fmt_double(worst));
  } catch (const Error& e) {
    line("roundtrip conjugate pairs", false, e.what());
  }

  try {
    int bad = 0;
    for (int i = 0; i < 15; ++i) {
      int n = 2 + i % 2;
      int k = 2 + i % (n - 1);
      LinearTuple lt = random_generic_tuple(n, Dims(k), rng, tol);
      Matrix phi = random_symplectic(lt.mu, rng);
      LinearTuple moved{lt.ambient_dim, lt.mu,
                        Subspace(lt.ambient_dim, phi * lt.u1.basis),
                        Subspace(lt.ambient_dim, phi * lt.u2.basis)};
      CharNumbers a = characteristic_numbers(reduce(lt, Dims(k), tol), tol);
      CharNumbers b = characteristic_numbers(reduce(moved, Dims(k), tol), tol);
      if (!multiset_equal(a.collapsed, b.collapsed, tol)) ++bad;
    }
    line("symplectic invariance", bad == 0, "15 tuples, " + std::to_string(bad) + " mismatches");
  } catch (const Error& e) {
    line("symplectic invariance", false, e.what());
  }

  try {
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      int two_s = 2 * (1 + i % 3);
      Matrix a = random_skew(two_s, rng, tol);
      Matrix b = random_skew(two_s, rng, tol);
      worst = std::max(worst, pairing_defect(eigen_multiset(a.inverse() * b, tol)));
    }
    line("eigenvalue pairing", worst < 1e-7, "30 skew pairs, max defect " + fmt_double(worst));
  } catch (const Error& e) {
    line("eigenvalue pairing", false, e.what());
  }

  try {
    int bad = 0;
    for (int k : {1, 5}) {
      for (int i = 0; i < 5; ++i) {
        LinearTuple a = random_generic_tuple(3, Dims(k), rng, tol);
        LinearTuple b = random_generic_tuple(3, Dims(k), rng, tol);
        if (reduce(a, Dims(k), tol).s != 0) ++bad;
        GermPair g1 = germ_pair_from_linear(a.mu, a.u1, a.u2);
        GermPair g2 = germ_pair_from_linear(b.mu, b.u1, b.u2);
        if (decide_equivalence(g1, g2, tol).status != Verdict::Status::Equivalent) ++bad;
      }
    }
    line("zero-tuple regimes", bad == 0, "k=1 and k=2n-1, " + std::to_string(bad) + " failures");
  } catch (const Error& e) {
    line("zero-tuple regimes", false, e.what());
  }

  try {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      LinearTuple lt = random_generic_tuple(4, Dims(4), rng, tol);
      Matrix phi = random_symplectic(lt.mu, rng);
      LinearTuple moved{lt.ambient_dim, lt.mu,
                        Subspace(lt.ambient_dim, phi * lt.u1.basis),
                        Subspace(lt.ambient_dim, phi * lt.u2.basis)};
      ReducedLinearization r1 = reduce(lt, Dims(4), tol);
      ReducedLinearization r2 = reduce(moved, Dims(4), tol);
      auto w = linear_equivalence_witness(r1, r2, tol);
      if (!w) {
        worst = 1.0;
        continue;
      }
      ABCMatrices n1 = c_normalize(extract_ABC(r1, tol), tol);
      ABCMatrices n2 = c_normalize(extract_ABC(r2, tol), tol);
      worst = std::max(worst,
                       (w->transpose() * n1.a * *w - n2.a).norm() / n2.a.norm());
      worst = std::max(worst,
                       (w->transpose() * n1.b * *w - n2.b).norm() / n2.b.norm());
    }
    line("congruence witness", worst < 1e-6, "5 pairs, max residual " + fmt_double(worst));
  } catch (const Error& e) {
    line("congruence witness", false, e.what());
  }

  try {
    int checked = 0, bad = 0;
    for (int n = 1; n <= 8; ++n) {
      for (int k = 1; k <= 2 * n - 1; ++k) {
        ModuliCount mc = moduli_count(k, n);
        ++checked;
        if (k == 1 || k == 2 * n - 1) {
          if (mc.infinite || mc.value != 0) ++bad;
        } else if (k <= n) {
          if (mc.infinite || mc.value != k / 2) ++bad;
        } else if (k >= 2 * n - 3) {
          if (mc.infinite || mc.value != 1) ++bad;
        } else if (!mc.infinite) {
          ++bad;
        }
      }
    }
    line("moduli table", bad == 0,
         std::to_string(checked) + " entries, " + std::to_string(bad) + " mismatches");
  } catch (const Error& e) {
    line("moduli table", false, e.what());
  }

  out << "result: " << (pass ? "PASS" : "FAIL") << "\n";
  return {pass, out.str()};
}

}  // namespace symgerm
