#pragma once

#include <cstdint>

#include "gridfed/sim_engine.hpp"
#include "gridfed/types.hpp"

namespace gridfed {

// One manager -> contractor negotiation message.
struct SlaBid {
  JobKey job = 0;
  JobId job_id;
  ResourceId manager = 0;
  ResourceId contractor = 0;
  SimTime expected_response = 0;  // d_e: the contractor must finish within this once dispatched
  SimTime window = 0;             // expiry window; 0 asks for an immediate decision
  std::uint32_t iteration = 1;
  std::uint64_t serial = 0;  // unique per manager, used to discard stale replies
};

// Which side owns a BidExpiry timer.
enum class TimerOwner : std::uint8_t { Manager, Contractor };

// Payload carried by every federation event.
struct Message {
  SlaBid bid;
  bool accepted = false;
  TimerOwner timer = TimerOwner::Manager;
};

using FederationEngine = Engine<Message>;

}  // namespace gridfed
