#pragma once

#include <cmath>

#include "gridfed/model.hpp"

namespace gridfed::economy {

// Static price of a resource: linear in its MIPS rating, anchored so the
// fastest resource charges the access price.
inline double quote_price(double mips, const EconomyParams& params) {
  return params.access_price / params.fastest_mips * mips;
}

// Truncates a price to whole cents for reporting. The small epsilon absorbs
// representation error so values like 5.3 do not print as 5.29.
inline double truncate_cents(double value) {
  return std::floor(value * 100.0 + 1e-9) / 100.0;
}

// Expected response time of `job` on `resource` once dispatched: compute time
// on its processors plus communication overhead. Admission only happens when
// processors are free, so there is no queue-wait term.
inline SimTime exec_time(const Job& job, const ResourceSpec& resource) {
  if (resource.processors < job.processors) {
    throw SimulationError("job " + std::to_string(job.id.index) + " needs " +
                          std::to_string(job.processors) + " processors; resource " +
                          resource.name + " has " + std::to_string(resource.processors));
  }
  return job.length_mi / resource.mips * (1.0 + job.comm_overhead);
}

// Owner revenue (and user spend) for running `job` on `resource`.
inline double cost(const Job& job, const ResourceSpec& resource) {
  return resource.price * static_cast<double>(job.processors) * exec_time(job, resource);
}

inline double assign_budget(const Job& job, const ResourceSpec& origin, const EconomyParams& params) {
  return params.budget_multiplier * cost(job, origin);
}

inline SimTime assign_deadline(const Job& job, const ResourceSpec& origin,
                               const EconomyParams& params) {
  return params.deadline_multiplier * exec_time(job, origin);
}

}  // namespace gridfed::economy
