#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "gridfed/economy.hpp"
#include "gridfed/model.hpp"
#include "gridfed/protocol.hpp"

namespace gridfed {

// A negotiated bid waiting in a contractor's queue.
struct BidEntry {
  SlaBid bid;
  SimTime arrival = 0;
  SimTime expiry_at = 0;
  double incentive = 0;  // owner revenue if accepted
  EventHandle expiry;
};

struct Reservation {
  JobKey job = 0;
  JobId job_id;
  ResourceId manager = 0;
  std::int64_t processors = 0;
  SimTime start = 0;  // when the dispatched job lands here
  SimTime expected_finish = 0;
  double incentive = 0;
};

struct LrmsCounters {
  std::uint64_t bids_received = 0;
  std::uint64_t remote_bids_received = 0;  // from managers other than this resource's own
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;  // synchronous rejects plus expiries
  std::uint64_t duplicate_bids = 0;
  std::uint64_t greedy_passes = 0;
};

// Orders pending bids for a greedy pass: incentive descending, then earlier
// arrival, then job id.
inline bool greedy_before(const BidEntry& a, const BidEntry& b) {
  if (a.incentive != b.incentive) return a.incentive > b.incentive;
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.bid.job_id < b.bid.job_id;
}

/// Contractor side of a federation agent: admission control over a queue of
/// SLA bids, maximizing owner revenue subject to free processors and each
/// bid's response-time requirement (greedy backfilling), plus the immediate
/// FCFS decision used for zero-window bids.
///
/// Capacity is a single count of free processors. Accepted jobs hold their
/// processors from acceptance until they finish.
class Lrms {
 public:
  Lrms(ResourceSpec resource, FederationEngine& engine, std::span<const Job> jobs,
       SimTime transfer_delay = 0, SimTime return_delay = 0)
      : resource_(std::move(resource)),
        engine_(&engine),
        jobs_(jobs),
        transfer_delay_(transfer_delay),
        return_delay_(return_delay),
        free_(resource_.processors) {}

  const ResourceSpec& resource() const { return resource_; }
  std::int64_t free_processors() const { return free_; }
  std::int64_t reserved_processors() const { return reserved_; }
  const std::vector<BidEntry>& pending() const { return pending_; }
  const std::map<JobKey, Reservation>& reservations() const { return reservations_; }
  double earnings() const { return earnings_; }
  double mi_executed() const { return mi_executed_; }
  const LrmsCounters& counters() const { return counters_; }
  const std::vector<JobKey>& completed() const { return completed_; }

  bool is_pending(JobKey job) const { return find_pending(job) != pending_.end(); }
  bool holds(JobKey job) const { return reservations_.contains(job); }

  bool feasible(const SlaBid& bid) const {
    const Job& job = jobs_[bid.job];
    return free_ >= job.processors && job.processors <= resource_.processors &&
           bid.expected_response >= economy::exec_time(job, resource_);
  }

  double incentive(const Job& job) const { return economy::cost(job, resource_); }

  void on_bid_arrival(const SlaBid& bid) {
    ++counters_.bids_received;
    if (bid.manager != resource_.id) ++counters_.remote_bids_received;
    if (is_pending(bid.job) || holds(bid.job)) {
      ++counters_.duplicate_bids;
      return;
    }
    if (bid.window <= 0) {
      fcfs_decide(bid);
      return;
    }
    const SimTime now = engine_->now();
    BidEntry entry{bid, now, now + bid.window, incentive(jobs_[bid.job]), {}};
    Message timer{bid, false, TimerOwner::Contractor};
    entry.expiry = engine_->schedule(entry.expiry_at, EventKind::BidExpiry, timer);
    pending_.push_back(entry);
    strict_greedy();
  }

  /// Immediate admission decision for a zero-window bid. Nothing is queued;
  /// the manager gets an accept or reject reply at once.
  bool fcfs_decide(const SlaBid& bid) {
    if (feasible(bid)) {
      const Job& job = jobs_[bid.job];
      commit(bid, incentive(job));
      return true;
    }
    ++counters_.rejected;
    engine_->schedule_in(0, EventKind::BidReply, Message{bid, false, TimerOwner::Manager});
    return false;
  }

  /// One pass over the pending queue in decreasing incentive order; every bid
  /// that fits the remaining processors and whose response-time requirement
  /// this resource can meet is reserved. The rest stay queued.
  std::vector<JobKey> strict_greedy() {
    ++counters_.greedy_passes;
    std::vector<JobKey> accepted;
    if (pending_.empty()) return accepted;

    std::vector<BidEntry> sorted = pending_;
    std::sort(sorted.begin(), sorted.end(), greedy_before);
    for (const BidEntry& entry : sorted) {
      if (free_ <= 0) break;
      if (feasible(entry.bid)) {
        reserve(entry.bid.job);
        accepted.push_back(entry.bid.job);
      }
    }
    return accepted;
  }

  // Reserves a pending bid. Precondition: the bid is feasible right now.
  const Reservation& reserve(JobKey job) {
    auto it = find_pending(job);
    if (it == pending_.end()) {
      throw SimulationError("reserve: job is not pending at " + resource_.name);
    }
    if (!feasible(it->bid)) {
      throw SimulationError("reserve: infeasible bid at " + resource_.name);
    }
    BidEntry entry = *it;
    pending_.erase(it);
    engine_->cancel(entry.expiry);
    return commit(entry.bid, entry.incentive);
  }

  // The contractor's own expiry timer: last-chance admission, else reject.
  void on_bid_expiry(JobKey job) {
    auto it = find_pending(job);
    if (it == pending_.end()) return;
    if (feasible(it->bid)) {
      reserve(job);
      return;
    }
    pending_.erase(it);
    ++counters_.rejected;
  }

  /// Resolves a pending bid whose window ends now, ahead of its queued expiry
  /// event. Returns false if the bid was not pending.
  bool expire_now(JobKey job) {
    auto it = find_pending(job);
    if (it == pending_.end()) return false;
    engine_->cancel(it->expiry);
    on_bid_expiry(job);
    return true;
  }

  void on_job_dispatch_arrive(JobKey job) {
    auto it = reservations_.find(job);
    if (it == reservations_.end()) {
      throw SimulationError("dispatched job has no reservation at " + resource_.name);
    }
    Message msg;
    msg.bid.job = job;
    msg.bid.job_id = it->second.job_id;
    msg.bid.manager = it->second.manager;
    msg.bid.contractor = resource_.id;
    engine_->schedule(it->second.expected_finish, EventKind::JobFinish, msg);
  }

  void on_job_finish(JobKey job) {
    auto it = reservations_.find(job);
    if (it == reservations_.end()) {
      throw SimulationError("finish for unknown reservation at " + resource_.name);
    }
    const Reservation res = it->second;
    reservations_.erase(it);
    free_ += res.processors;
    reserved_ -= res.processors;
    mi_executed_ += jobs_[job].length_mi;
    completed_.push_back(job);

    Message msg;
    msg.bid.job = job;
    msg.bid.job_id = res.job_id;
    msg.bid.manager = res.manager;
    msg.bid.contractor = resource_.id;
    engine_->schedule_in(return_delay_, EventKind::ResultReturn, msg);
    strict_greedy();
  }

 private:
  std::vector<BidEntry>::iterator find_pending(JobKey job) {
    return std::find_if(pending_.begin(), pending_.end(),
                        [&](const BidEntry& e) { return e.bid.job == job; });
  }
  std::vector<BidEntry>::const_iterator find_pending(JobKey job) const {
    return std::find_if(pending_.begin(), pending_.end(),
                        [&](const BidEntry& e) { return e.bid.job == job; });
  }

  const Reservation& commit(const SlaBid& bid, double incentive) {
    const Job& job = jobs_[bid.job];
    const SimTime start = engine_->now() + transfer_delay_;
    Reservation res{bid.job,        bid.job_id, bid.manager, job.processors, start,
                    start + economy::exec_time(job, resource_), incentive};
    free_ -= job.processors;
    reserved_ += job.processors;
    if (free_ < 0) {
      throw SimulationError("capacity overcommitted at " + resource_.name);
    }
    earnings_ += incentive;
    ++counters_.accepted;
    engine_->schedule_in(0, EventKind::BidReply, Message{bid, true, TimerOwner::Manager});
    return reservations_.emplace(bid.job, res).first->second;
  }

  ResourceSpec resource_;
  FederationEngine* engine_;
  std::span<const Job> jobs_;
  SimTime transfer_delay_;
  SimTime return_delay_;

  std::int64_t free_;
  std::int64_t reserved_ = 0;
  std::vector<BidEntry> pending_;
  std::map<JobKey, Reservation> reservations_;
  std::vector<JobKey> completed_;
  double earnings_ = 0;
  double mi_executed_ = 0;
  LrmsCounters counters_;
};

}  // namespace gridfed
