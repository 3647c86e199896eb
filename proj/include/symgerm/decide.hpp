#pragma once

#include "symgerm/hamiltonians.hpp"
#include "symgerm/invariants.hpp"

namespace symgerm {

/// Outcome of the equivalence decision, with the rule that fired and the
/// compared invariants. Undetermined always carries a reason.
struct Verdict {
  enum class Status { Equivalent, NotEquivalent, Undetermined };
  Status status = Status::Undetermined;
  std::string rule;    // "A1", "A2", "A'", "B", "B'", "3.2", "C'" or empty
  std::string reason;  // set when Undetermined
  std::map<std::string, std::string> details;
  std::optional<HamiltonianField> field1, field2;  // functional-moduli regime
};

/// Decide germ equivalence at the base points where the classification
/// theorems license a verdict; in the functional-moduli regime a value
/// mismatch at the base point refutes equivalence, agreement stays
/// undetermined.
Verdict decide_equivalence(const GermPair& gp1, const GermPair& gp2, const ToleranceConfig& tol);

const char* to_string(Verdict::Status s);

}  // namespace symgerm
