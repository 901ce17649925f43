#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gridfed {

// Simulation time in sim units (one sim unit = one trace second). Negotiation
// windows halve repeatedly, so time is continuous.
using SimTime = double;

inline constexpr SimTime kForever = std::numeric_limits<SimTime>::infinity();

// Dense index of a federation resource (0-based, matches config order).
using ResourceId = std::uint32_t;

// Dense index of a job inside one run's job table.
using JobKey = std::size_t;

// (i, j, k): i-th job of the j-th user submitted at the k-th resource.
struct JobId {
  std::int64_t index = 0;
  std::int32_t user = 1;
  ResourceId resource = 0;

  auto operator<=>(const JobId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const JobId& id) {
  return os << '(' << id.index << ',' << id.user << ',' << id.resource << ')';
}

// Raised on internal logic errors: causality violations, broken capacity
// accounting, audit failures. Aborts the run.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised for bad user input: config files, traces, CLI arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gridfed
