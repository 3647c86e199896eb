#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace symgerm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SYMGERM_DEFINE_ERROR(Name) \
  struct Name : Error {            \
    using Error::Error;            \
  }

SYMGERM_DEFINE_ERROR(SingularForm);
SYMGERM_DEFINE_ERROR(NoConvergence);
SYMGERM_DEFINE_ERROR(ValidationError);
SYMGERM_DEFINE_ERROR(EvalError);
SYMGERM_DEFINE_ERROR(PointNotOnStratum);
SYMGERM_DEFINE_ERROR(GenericityViolation);
SYMGERM_DEFINE_ERROR(DegenerateSplitting);
SYMGERM_DEFINE_ERROR(SingularC);
SYMGERM_DEFINE_ERROR(RouteMismatch);
SYMGERM_DEFINE_ERROR(UnpairedEigenvalue);
SYMGERM_DEFINE_ERROR(DegenerateSpectrum);
SYMGERM_DEFINE_ERROR(DimensionMismatch);
SYMGERM_DEFINE_ERROR(OutOfRange);
SYMGERM_DEFINE_ERROR(NewtonDivergence);
SYMGERM_DEFINE_ERROR(WrongRegime);
SYMGERM_DEFINE_ERROR(DegenerateRestriction);
SYMGERM_DEFINE_ERROR(InvalidSpec);
SYMGERM_DEFINE_ERROR(RoundtripFailure);
SYMGERM_DEFINE_ERROR(InternalError);

#undef SYMGERM_DEFINE_ERROR

/// Syntax error with the byte offset of the failure and the token classes
/// that would have been accepted there.
struct ParseError : Error {
  ParseError(std::string msg, std::size_t offset, std::vector<std::string> expected)
      : Error(std::move(msg)), offset(offset), expected(std::move(expected)) {}
  std::size_t offset;
  std::vector<std::string> expected;
};

}  // namespace symgerm
