#pragma once

#include <cstdint>
#include <string>

#include "gridfed/types.hpp"

namespace gridfed {

// One cluster in the federation.
struct ResourceSpec {
  ResourceId id = 0;
  std::string name;
  std::int64_t processors = 1;
  double mips = 1.0;       // per processor
  double price = 1.0;      // grid dollars per processor per sim unit
  double bandwidth = 0.0;  // Gb/s; carried from the resource table, not used by the time model
};

struct EconomyParams {
  double access_price = 5.3;  // price of the fastest resource
  double fastest_mips = 930.0;
  double budget_multiplier = 2.0;
  double deadline_multiplier = 3.0;
  double comm_fraction = 0.10;
};

enum class Strategy : std::uint8_t {
  OptimizeForTime,  // OFT
  OptimizeForCost,  // OFC
};

// A parallel job together with its SLA parameters.
struct Job {
  JobId id;
  ResourceId origin = 0;
  std::int64_t processors = 1;
  double length_mi = 1.0;      // million instructions
  double comm_overhead = 0.0;  // fraction of execution time
  double budget = 0.0;         // grid dollars
  SimTime deadline = 0.0;      // relative to submission
  SimTime submit_time = 0.0;
  Strategy strategy = Strategy::OptimizeForTime;
};

}  // namespace gridfed
