#pragma once

#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gridfed/directory.hpp"
#include "gridfed/lrms.hpp"
#include "gridfed/protocol.hpp"
#include "gridfed/superscheduler.hpp"

namespace gridfed {

struct FederationOptions {
  NegotiationPolicy negotiation;
  SimTime horizon = kForever;
  // Stop the clock at the horizon instead of draining in-flight work.
  bool hard_stop = false;
  SimTime directory_latency = 0;
  // Check capacity accounting at every event boundary.
  bool audit_every_event = true;
};

/// Wires one manager/contractor pair per resource around a shared directory
/// and routes engine events between them.
class Federation {
 public:
  using Observer = std::function<void(const FederationEngine::Event&, const Federation&)>;

  Federation(std::vector<ResourceSpec> resources, std::vector<Job> jobs, FederationOptions options)
      : options_(options),
        resources_(std::move(resources)),
        jobs_(std::move(jobs)),
        directory_(options.directory_latency) {
    for (std::size_t i = 0; i < resources_.size(); ++i) {
      if (resources_[i].id != i) throw ConfigError("resource ids must be dense and ordered");
    }
    contractors_.reserve(resources_.size());
    managers_.reserve(resources_.size());
    for (const ResourceSpec& r : resources_) {
      directory_.subscribe(quote_of(r));
      contractors_.emplace_back(r, engine_, jobs_, options_.negotiation.submission_delay,
                                options_.negotiation.return_delay);
      managers_.emplace_back(r.id, options_.negotiation, directory_, engine_, jobs_);
    }
    for (JobKey k = 0; k < jobs_.size(); ++k) {
      if (jobs_[k].origin >= resources_.size()) throw ConfigError("job origin out of range");
    }
  }

  Federation(const Federation&) = delete;
  Federation& operator=(const Federation&) = delete;

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  // Submits every job and runs to completion (or to the horizon on hard stop).
  void run() {
    for (JobKey k = 0; k < jobs_.size(); ++k) {
      Message msg;
      msg.bid.job = k;
      msg.bid.job_id = jobs_[k].id;
      msg.bid.manager = jobs_[k].origin;
      engine_.schedule(jobs_[k].submit_time, EventKind::JobSubmit, msg);
    }
    auto handler = [this](const FederationEngine::Event& ev) {
      dispatch(ev);
      if (options_.audit_every_event) audit_capacity();
      if (observer_) observer_(ev, *this);
    };
    if (options_.hard_stop) {
      engine_.run_until(options_.horizon, handler);
    } else {
      engine_.run(handler);
      audit_drained();
    }
  }

  const FederationEngine& engine() const { return engine_; }
  const Directory& directory() const { return directory_; }
  std::span<const ResourceSpec> resources() const { return resources_; }
  std::span<const Job> jobs() const { return jobs_; }
  const std::vector<Lrms>& contractors() const { return contractors_; }
  const std::vector<Superscheduler>& managers() const { return managers_; }
  const FederationOptions& options() const { return options_; }

  const NegotiationState* negotiation(JobKey job) const {
    return managers_[jobs_[job].origin].negotiation(job);
  }

 private:
  void dispatch(const FederationEngine::Event& ev) {
    const SlaBid& bid = ev.payload.bid;
    switch (ev.kind) {
      case EventKind::JobSubmit:
        managers_[jobs_[bid.job].origin].on_job_submit(bid.job);
        break;
      case EventKind::BidArrive:
        contractors_[bid.contractor].on_bid_arrival(bid);
        break;
      case EventKind::BidReply:
        managers_[bid.manager].on_bid_reply(bid, ev.payload.accepted);
        break;
      case EventKind::BidExpiry:
        if (ev.payload.timer == TimerOwner::Contractor) {
          contractors_[bid.contractor].on_bid_expiry(bid.job);
        } else {
          // Both windows close at the same instant; the contractor's last-chance
          // admission happens first, and an acceptance reply supersedes the timeout.
          Lrms& contractor = contractors_[bid.contractor];
          contractor.expire_now(bid.job);
          if (contractor.holds(bid.job)) break;
          managers_[bid.manager].on_bid_timeout(bid);
        }
        break;
      case EventKind::JobDispatchArrive:
        contractors_[bid.contractor].on_job_dispatch_arrive(bid.job);
        break;
      case EventKind::JobFinish:
        contractors_[bid.contractor].on_job_finish(bid.job);
        break;
      case EventKind::ResultReturn:
        managers_[bid.manager].on_result_return(bid.job);
        break;
    }
  }

  void audit_capacity() const {
    for (const Lrms& c : contractors_) {
      std::int64_t held = 0;
      for (const auto& [job, res] : c.reservations()) held += res.processors;
      if (c.free_processors() < 0 || held > c.resource().processors ||
          held + c.free_processors() != c.resource().processors) {
        std::ostringstream os;
        os << "capacity accounting broken at " << c.resource().name << " t=" << engine_.now()
           << " free=" << c.free_processors() << " held=" << held;
        throw SimulationError(os.str());
      }
    }
  }

  // After a full drain every negotiation is closed and every contractor idle.
  void audit_drained() const {
    std::vector<int> holders(jobs_.size(), 0);
    for (const Lrms& c : contractors_) {
      if (!c.pending().empty() || !c.reservations().empty()) {
        throw SimulationError("contractor " + c.resource().name + " not drained");
      }
      for (JobKey k : c.completed()) ++holders[k];
    }
    for (JobKey k = 0; k < jobs_.size(); ++k) {
      const NegotiationState* st = negotiation(k);
      if (st == nullptr) throw SimulationError("job never submitted");
      switch (st->status) {
        case NegotiationStatus::Bidding:
          throw SimulationError("negotiation still open after drain");
        case NegotiationStatus::Accepted:
          if (holders[k] != 1 || !st->result_at) {
            throw SimulationError("accepted job not executed exactly once");
          }
          break;
        case NegotiationStatus::Dropped:
          if (holders[k] != 0) throw SimulationError("dropped job was executed");
          break;
      }
    }
  }

  FederationOptions options_;
  std::vector<ResourceSpec> resources_;
  std::vector<Job> jobs_;
  FederationEngine engine_;
  Directory directory_;
  std::vector<Lrms> contractors_;
  std::vector<Superscheduler> managers_;
  Observer observer_;
};

}  // namespace gridfed
