#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridfed/directory.hpp"
#include "gridfed/model.hpp"
#include "gridfed/protocol.hpp"

namespace gridfed {

enum class NegotiationStatus : std::uint8_t { Bidding, Accepted, Dropped };

enum class DropReason : std::uint8_t {
  None,
  InfeasibleSplit,     // bidding + transfer delays leave no room for execution
  NoEligibleResource,  // nobody in the directory is wide enough
  BudgetExhausted,     // next expiry window would fall below the floor
  PassLimit,           // immediate-decision walk visited every resource once
};

constexpr std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::None: return "none";
    case DropReason::InfeasibleSplit: return "infeasible-split";
    case DropReason::NoEligibleResource: return "no-eligible-resource";
    case DropReason::BudgetExhausted: return "budget-exhausted";
    case DropReason::PassLimit: return "pass-limit";
  }
  return "?";
}

struct MessageCounts {
  std::uint32_t bids = 0;
  std::uint32_t replies = 0;
  std::uint32_t dispatches = 0;
  std::uint32_t results = 0;

  std::uint32_t total() const { return bids + replies + dispatches + results; }
};

struct NegotiationState {
  JobKey job = 0;
  SimTime negotiation_budget = 0;  // t_neg
  SimTime expected_response = 0;   // d_e
  SimTime consumed = 0;            // bidding time already spent
  std::uint32_t iteration = 1;
  std::size_t rank_cursor = 1;
  NegotiationStatus status = NegotiationStatus::Bidding;
  DropReason drop_reason = DropReason::None;

  std::optional<SlaBid> outstanding;
  SimTime sent_at = 0;
  SimTime query_delay = 0;  // directory latency paid by the outstanding bid
  EventHandle timer;

  ResourceId contractor = 0;  // valid once Accepted
  SimTime decided_at = 0;
  std::optional<SimTime> result_at;
  MessageCounts messages;
  std::vector<SimTime> windows;         // expiry window of every bid sent
  std::vector<ResourceId> contacted;    // contractor of every bid sent
};

/// Splits a job's deadline into a bidding budget (a fraction `phi` of the
/// deadline) and the response time demanded from contractors:
///   deadline = submission_delay + budget + expected_response + return_delay.
/// A split that leaves no room is dropped immediately.
inline NegotiationState init_negotiation(const Job& job, JobKey key, double phi,
                                         SimTime submission_delay, SimTime return_delay) {
  NegotiationState st;
  st.job = key;
  st.negotiation_budget = phi * job.deadline;
  st.expected_response = job.deadline - submission_delay - st.negotiation_budget - return_delay;
  if (!(st.expected_response > 0)) {
    st.status = NegotiationStatus::Dropped;
    st.drop_reason = DropReason::InfeasibleSplit;
  }
  return st;
}

// Next expiry window: half of the bidding budget not yet spent.
inline SimTime tau_next_interval(const NegotiationState& st) {
  return (st.negotiation_budget - st.consumed) / 2.0;
}

struct NegotiationPolicy {
  double phi = 0.0;
  SimTime min_bid_interval = 1.0;
  SimTime submission_delay = 0.0;
  SimTime return_delay = 0.0;
  // Contractors decide on arrival (zero-window bids); the walk makes one pass.
  bool immediate_decisions = true;
};

/// Manager side of a federation agent. For each locally submitted job it walks
/// the directory ranking (wrapping around while budget remains), offering the
/// job to one contractor at a time with geometrically shrinking expiry windows
/// until a contractor accepts or the job is dropped.
class Superscheduler {
 public:
  Superscheduler(ResourceId self, NegotiationPolicy policy, const Directory& directory,
                 FederationEngine& engine, std::span<const Job> jobs)
      : self_(self), policy_(policy), directory_(&directory), engine_(&engine), jobs_(jobs) {}

  ResourceId id() const { return self_; }
  const NegotiationPolicy& policy() const { return policy_; }
  const std::map<JobKey, NegotiationState>& negotiations() const { return negotiations_; }
  std::uint64_t stale_replies() const { return stale_replies_; }

  const NegotiationState* negotiation(JobKey job) const {
    auto it = negotiations_.find(job);
    return it == negotiations_.end() ? nullptr : &it->second;
  }

  void on_job_submit(JobKey key) {
    const Job& job = jobs_[key];
    auto [it, inserted] = negotiations_.emplace(
        key, init_negotiation(job, key, policy_.phi, policy_.submission_delay, policy_.return_delay));
    if (!inserted) throw SimulationError("job submitted twice");
    NegotiationState& st = it->second;
    st.decided_at = engine_->now();
    if (st.status == NegotiationStatus::Bidding) send_bid(st);
  }

  // Offers the job to the contractor at the current rank.
  void send_bid(NegotiationState& st) {
    const Job& job = jobs_[st.job];
    const std::size_t eligible = directory_->eligible_count(job.processors);
    if (eligible == 0) return drop(st, DropReason::NoEligibleResource);
    if (policy_.immediate_decisions && st.rank_cursor > eligible) {
      return drop(st, DropReason::PassLimit);
    }
    const std::size_t rank = (st.rank_cursor - 1) % eligible + 1;
    const auto quote = directory_->query_kth(job.strategy, rank, job.processors);
    if (!quote) return drop(st, DropReason::NoEligibleResource);

    const SimTime latency = directory_->query_latency();
    SimTime window = 0;
    if (!policy_.immediate_decisions) {
      window = tau_next_interval(st);
      if (latency > 0) {
        window = (st.negotiation_budget - st.consumed - latency) / 2.0;
        if (!(window > 0)) return drop(st, DropReason::BudgetExhausted);
      }
    }

    SlaBid bid{st.job,  job.id, self_, quote->resource, st.expected_response,
               window, st.iteration, ++serial_};
    st.outstanding = bid;
    st.sent_at = engine_->now();
    st.query_delay = latency;
    st.windows.push_back(window);
    st.contacted.push_back(quote->resource);
    ++st.messages.bids;
    ++st.rank_cursor;

    engine_->schedule_in(latency, EventKind::BidArrive, Message{bid, false, TimerOwner::Manager});
    if (!policy_.immediate_decisions) {
      st.timer = engine_->schedule_in(latency + window, EventKind::BidExpiry,
                                      Message{bid, false, TimerOwner::Manager});
    }
  }

  void on_bid_reply(const SlaBid& bid, bool accepted) {
    NegotiationState* st = live(bid);
    if (st == nullptr) {
      ++stale_replies_;
      return;
    }
    ++st->messages.replies;
    engine_->cancel(st->timer);
    if (accepted) {
      st->status = NegotiationStatus::Accepted;
      st->contractor = bid.contractor;
      st->decided_at = engine_->now();
      st->outstanding.reset();
      ++st->messages.dispatches;
      engine_->schedule_in(policy_.submission_delay, EventKind::JobDispatchArrive,
                           Message{bid, true, TimerOwner::Manager});
      return;
    }
    // An early reject only costs the time that actually elapsed.
    st->consumed += engine_->now() - st->sent_at;
    resolve_and_continue(*st);
  }

  void on_bid_timeout(const SlaBid& bid) {
    NegotiationState* st = live(bid);
    if (st == nullptr) return;
    st->consumed += st->query_delay + st->outstanding->window;
    resolve_and_continue(*st);
  }

  void on_result_return(JobKey job) {
    auto it = negotiations_.find(job);
    if (it == negotiations_.end() || it->second.status != NegotiationStatus::Accepted) {
      throw SimulationError("result returned for a job that was never accepted");
    }
    ++it->second.messages.results;
    it->second.result_at = engine_->now();
  }

 private:
  NegotiationState* live(const SlaBid& bid) {
    auto it = negotiations_.find(bid.job);
    if (it == negotiations_.end()) return nullptr;
    NegotiationState& st = it->second;
    if (st.status != NegotiationStatus::Bidding || !st.outstanding ||
        st.outstanding->serial != bid.serial) {
      return nullptr;
    }
    return &st;
  }

  void resolve_and_continue(NegotiationState& st) {
    st.outstanding.reset();
    ++st.iteration;
    if (policy_.immediate_decisions || tau_next_interval(st) >= policy_.min_bid_interval) {
      send_bid(st);
    } else {
      drop(st, DropReason::BudgetExhausted);
    }
  }

  void drop(NegotiationState& st, DropReason reason) {
    st.status = NegotiationStatus::Dropped;
    st.drop_reason = reason;
    st.decided_at = engine_->now();
    st.outstanding.reset();
  }

  ResourceId self_;
  NegotiationPolicy policy_;
  const Directory* directory_;
  FederationEngine* engine_;
  std::span<const Job> jobs_;
  std::map<JobKey, NegotiationState> negotiations_;
  std::uint64_t serial_ = 0;
  std::uint64_t stale_replies_ = 0;
};

}  // namespace gridfed
