#pragma once

#include "symgerm/hamiltonians.hpp"
#include "symgerm/invariants.hpp"

namespace symgerm {

/// Recipe for one normal-form row: dimensions, the row tag, and the
/// invariant payload (s numbers, or s coefficient functions of (u, v) in
/// the functional regime).
struct NormalFormSpec {
  enum class Case { K1, KLeNS1, KLeN, Functional, SingleLambdaHigh, K2nMinus1 };
  int n = 0;
  int k = 0;
  Case tag = Case::K1;
  ComplexMultiset lambdas;                  // numeric rows; conjugate-closed
  std::vector<std::string> hamiltonians;    // functional row

  int s() const;
};

NormalFormSpec::Case nf_case_from_string(const std::string& name);
const char* to_string(NormalFormSpec::Case c);

NormalFormSpec nf_spec_from_json(const nlohmann::json& doc);

/// Throws InvalidSpec on zero invariants, incomplete conjugate pairs, or a
/// tag inconsistent with (k, n).
void validate(const NormalFormSpec& spec);

/// Build the model germ pair of the row: coordinates (x, y, u, v), flat
/// coordinate strata, and the row form. A conjugate pair a+-bi occupies two
/// adjacent slots and contributes a real 4x4 y-block chosen so the quarter
/// pencil product has spectrum {a+-bi}, each with multiplicity 2.
GermPair synthesize(const NormalFormSpec& spec);

struct RoundtripReport {
  GermPair germ;
  ComplexMultiset recovered;               // collapsed multiset at the base point
  std::optional<HamiltonianField> field;   // functional row
  std::map<std::string, double> residuals; // per compared quantity
  double max_residual = 0.0;
};

/// Synthesize, run the full invariant pipeline, and compare the recovered
/// invariants against the payload. Throws RoundtripFailure naming the first
/// mismatched quantity.
RoundtripReport roundtrip_verify(const NormalFormSpec& spec, const ToleranceConfig& tol);

}  // namespace symgerm
