#pragma once

#include <cstdint>
#include <string>

namespace symgerm {

struct SelftestResult {
  bool pass = false;
  std::string report;
};

/// Deterministic randomized property suite; the report is byte-identical
/// for a given seed.
SelftestResult selftest(std::uint64_t seed);

}  // namespace symgerm
