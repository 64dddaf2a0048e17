#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace onelife {

// Opaque label handles. All alphabets are declared up front and labels are
// resolved to dense indices at parse/construction time.
using StateId = std::int32_t;
using ActionId = std::int32_t;
using ObsId = std::int32_t;
using EventId = std::int32_t;

inline constexpr StateId kNoState = -1;

// Error taxonomy, mirrored by the CLI exit codes (see tools/).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A recorded life contradicts the world it claims to come from.
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingOracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbabilityInterval {
  double low = 0.0;
  double high = 1.0;

  ProbabilityInterval() = default;
  ProbabilityInterval(double lo, double hi) : low(lo), high(hi) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) {
      throw InputError("probability interval must satisfy 0 <= low <= high <= 1");
    }
  }

  bool contains(double p) const { return low <= p && p <= high; }
  double midpoint() const { return 0.5 * (low + high); }
};

enum class TerminationCause { NaturalDeath, SuddenDeath };

enum class StateClass { AbsoluteBeginning, SuddenDeath, Ordinary };

inline const char* to_string(TerminationCause c) {
  return c == TerminationCause::NaturalDeath ? "natural-death" : "sudden-death";
}

inline const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::AbsoluteBeginning: return "absolute-beginning";
    case StateClass::SuddenDeath: return "sudden-death";
    default: return "ordinary";
  }
}

}  // namespace onelife
