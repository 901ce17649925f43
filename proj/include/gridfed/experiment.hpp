#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "gridfed/economy.hpp"
#include "gridfed/federation.hpp"
#include "gridfed/workload.hpp"

namespace gridfed {

inline constexpr const char* kVersion = "1.0.0";

enum class AdmissionPolicy : std::uint8_t { GreedyBackfilling, Fcfs };

struct SimConfig {
  std::vector<ResourceSpec> resources;
  std::vector<workload::WorkloadSpec> workloads;  // one per resource
  EconomyParams economy;
  double phi = 0.0;
  double user_mix = 1.0;  // fraction of jobs whose users optimize for time
  SimTime min_bid_interval = 1.0;
  SimTime submission_delay = 0.0;
  SimTime return_delay = 0.0;
  SimTime horizon = 4 * 86400.0;
  std::uint64_t seed = 0;
  AdmissionPolicy policy = AdmissionPolicy::GreedyBackfilling;
  bool hard_stop = false;
  SimTime directory_latency = 0.0;

  // Zero-window bids (and therefore immediate decisions) whenever no bidding
  // time is allowed or FCFS is requested.
  bool immediate_decisions() const { return policy == AdmissionPolicy::Fcfs || phi == 0.0; }

  void validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
    if (resources.empty()) fail("at least one resource is required");
    if (workloads.size() != resources.size()) fail("every resource needs a workload");
    for (std::size_t i = 0; i < resources.size(); ++i) {
      const ResourceSpec& r = resources[i];
      if (r.id != i) fail("resource ids must follow declaration order");
      if (r.processors < 1) fail(r.name + ": processors must be >= 1");
      if (!(r.mips > 0)) fail(r.name + ": mips must be > 0");
      if (!(r.price > 0)) fail(r.name + ": price must be > 0");
    }
    const EconomyParams& e = economy;
    if (!(e.access_price > 0) || !(e.fastest_mips > 0) || !(e.comm_fraction >= 0) ||
        !(e.comm_fraction < 1)) {
      fail("economy parameters out of range");
    }
    if (!(e.budget_multiplier >= 1) || !(e.deadline_multiplier >= 1)) {
      fail("budget and deadline multipliers must be >= 1");
    }
    if (!(phi >= 0 && phi <= 1)) fail("phi must lie in [0, 1]");
    if (!(user_mix >= 0 && user_mix <= 1)) fail("user_mix must lie in [0, 1]");
    if (!(horizon > 0)) fail("horizon must be > 0");
    if (!(min_bid_interval > 0)) fail("min_bid_interval must be > 0");
    if (!(submission_delay >= 0) || !(return_delay >= 0) || !(directory_latency >= 0)) {
      fail("delays must be non-negative");
    }
  }
};

// Per-resource synthetic workloads without an explicit seed derive one from
// the run seed, so --seed changes the workload too.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t stream) {
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct JobSet {
  std::vector<Job> jobs;
  std::vector<std::uint64_t> loaded;          // per resource, rows inside the window
  std::vector<std::uint64_t> unschedulable;   // per resource, wider than every resource
  std::vector<workload::SwfLoadReport> trace_reports;
};

inline JobSet build_jobs(const SimConfig& config) {
  JobSet set;
  const std::size_t n = config.resources.size();
  set.loaded.assign(n, 0);
  set.unschedulable.assign(n, 0);
  set.trace_reports.resize(n);
  std::mt19937_64 users(derive_seed(config.seed, 0xFFFF));
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (std::size_t i = 0; i < n; ++i) {
    const ResourceSpec& origin = config.resources[i];
    std::vector<workload::TraceJob> rows;
    if (const auto* trace = std::get_if<workload::TraceSource>(&config.workloads[i].source)) {
      auto parsed = workload::parse_swf_file(trace->path);
      set.trace_reports[i] = parsed.report;
      rows = workload::select_window(parsed.jobs, trace->window_start, config.horizon);
    } else {
      workload::SyntheticSpec spec = std::get<workload::SyntheticSpec>(config.workloads[i].source);
      if (!spec.seed) spec.seed = derive_seed(config.seed, i);
      const auto generated = workload::synth_generate(spec);
      rows = workload::select_window(generated, 0, config.horizon);
    }
    set.loaded[i] = rows.size();
    for (const workload::TraceJob& row : rows) {
      Job job = workload::to_job(row, origin, config.economy);
      job.strategy = coin(users) < config.user_mix ? Strategy::OptimizeForTime
                                                   : Strategy::OptimizeForCost;
      if (!workload::fits_somewhere(job, config.resources)) {
        ++set.unschedulable[i];
        continue;
      }
      set.jobs.push_back(job);
    }
  }
  return set;
}

struct MetricsRecord {
  ResourceId resource = 0;
  std::string name;
  std::int64_t processors = 0;
  // Owner side: work and revenue this resource took on as contractor.
  double earnings = 0;
  double earnings_per_processor = 0;
  double mi_executed = 0;
  double busy_processor_time = 0;
  double utilization = 0;  // busy processor time / (processors * makespan)
  // User side: jobs that originated here.
  double avg_response = 0;
  double avg_budget = 0;
  std::uint64_t jobs_submitted = 0;
  std::uint64_t jobs_accepted = 0;
  std::uint64_t jobs_dropped = 0;
  std::uint64_t jobs_in_flight = 0;
  std::uint64_t jobs_unschedulable = 0;
  // Messages.
  std::uint64_t local_messages = 0;
  std::uint64_t remote_messages = 0;
  double arrival_rate = 0;       // bids received per sim unit
  double satisfaction_rate = 0;  // bids accepted per sim unit
};

struct FederationTotals {
  double total_earnings = 0;
  double avg_response = 0;
  double avg_budget = 0;
  double avg_messages_per_job = 0;
  std::uint64_t total_messages = 0;
  std::uint64_t jobs_submitted = 0;
  std::uint64_t jobs_accepted = 0;
  std::uint64_t jobs_dropped = 0;
  std::uint64_t jobs_in_flight = 0;
  std::uint64_t jobs_unschedulable = 0;
};

struct FederationReport {
  double phi = 0;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  SimTime makespan = 0;
  std::vector<MetricsRecord> resources;
  FederationTotals totals;
  double accepted_incentives = 0;  // sum of each accepted job's cost where it ran
};

inline FederationOptions federation_options(const SimConfig& config) {
  FederationOptions opts;
  opts.negotiation.phi = config.phi;
  opts.negotiation.min_bid_interval = config.min_bid_interval;
  opts.negotiation.submission_delay = config.submission_delay;
  opts.negotiation.return_delay = config.return_delay;
  opts.negotiation.immediate_decisions = config.immediate_decisions();
  opts.horizon = config.horizon;
  opts.hard_stop = config.hard_stop;
  opts.directory_latency = config.directory_latency;
  return opts;
}

inline FederationReport summarize(const Federation& fed, const JobSet& set, const SimConfig& config) {
  FederationReport report;
  report.phi = config.phi;
  report.seed = config.seed;
  report.makespan = fed.engine().now();
  const auto resources = fed.resources();
  const auto jobs = fed.jobs();

  report.resources.resize(resources.size());
  for (std::size_t i = 0; i < resources.size(); ++i) {
    MetricsRecord& m = report.resources[i];
    const Lrms& c = fed.contractors()[i];
    m.resource = resources[i].id;
    m.name = resources[i].name;
    m.processors = resources[i].processors;
    m.earnings = c.earnings();
    m.earnings_per_processor = m.earnings / static_cast<double>(m.processors);
    m.mi_executed = c.mi_executed();
    for (JobKey k : c.completed()) {
      m.busy_processor_time +=
          static_cast<double>(jobs[k].processors) * economy::exec_time(jobs[k], resources[i]);
    }
    if (report.makespan > 0) {
      m.utilization = m.busy_processor_time / (static_cast<double>(m.processors) * report.makespan);
      m.arrival_rate = static_cast<double>(c.counters().bids_received) / report.makespan;
      m.satisfaction_rate = static_cast<double>(c.counters().accepted) / report.makespan;
    }
    m.remote_messages = c.counters().remote_bids_received;
    m.jobs_unschedulable = set.unschedulable[i];
  }

  FederationTotals& t = report.totals;
  std::vector<double> response_sum(resources.size(), 0.0);
  std::vector<std::uint64_t> response_count(resources.size(), 0);
  std::vector<double> budget_sum(resources.size(), 0.0);
  double fed_response = 0, fed_budget = 0;
  std::uint64_t fed_returned = 0;

  for (JobKey k = 0; k < jobs.size(); ++k) {
    const Job& job = jobs[k];
    MetricsRecord& m = report.resources[job.origin];
    const NegotiationState* st = fed.negotiation(k);
    ++m.jobs_submitted;
    if (st == nullptr) throw SimulationError("job inside the horizon was never submitted");
    m.local_messages += st->messages.total();
    t.total_messages += st->messages.total();
    switch (st->status) {
      case NegotiationStatus::Bidding: ++m.jobs_in_flight; break;
      case NegotiationStatus::Dropped: ++m.jobs_dropped; break;
      case NegotiationStatus::Accepted: {
        ++m.jobs_accepted;
        const double spent = economy::cost(job, resources[st->contractor]);
        report.accepted_incentives += spent;
        budget_sum[job.origin] += spent;
        fed_budget += spent;
        if (st->result_at) {
          const SimTime response = *st->result_at - job.submit_time;
          response_sum[job.origin] += response;
          ++response_count[job.origin];
          fed_response += response;
          ++fed_returned;
        }
        break;
      }
    }
  }

  for (std::size_t i = 0; i < resources.size(); ++i) {
    MetricsRecord& m = report.resources[i];
    if (response_count[i] > 0) m.avg_response = response_sum[i] / static_cast<double>(response_count[i]);
    if (m.jobs_accepted > 0) m.avg_budget = budget_sum[i] / static_cast<double>(m.jobs_accepted);
    t.total_earnings += m.earnings;
    t.jobs_submitted += m.jobs_submitted;
    t.jobs_accepted += m.jobs_accepted;
    t.jobs_dropped += m.jobs_dropped;
    t.jobs_in_flight += m.jobs_in_flight;
    t.jobs_unschedulable += m.jobs_unschedulable;
  }
  if (fed_returned > 0) t.avg_response = fed_response / static_cast<double>(fed_returned);
  if (t.jobs_accepted > 0) t.avg_budget = fed_budget / static_cast<double>(t.jobs_accepted);
  if (t.jobs_submitted > 0) {
    t.avg_messages_per_job = static_cast<double>(t.total_messages) / static_cast<double>(t.jobs_submitted);
  }
  return report;
}

// Cross-checks that revenue and job counts close. Throws on a breach.
inline void audit_report(const FederationReport& report) {
  const FederationTotals& t = report.totals;
  const double scale = std::max(1.0, std::abs(report.accepted_incentives));
  if (std::abs(t.total_earnings - report.accepted_incentives) > 1e-9 * scale) {
    throw SimulationError("earnings do not match accepted incentives");
  }
  if (t.jobs_accepted + t.jobs_dropped + t.jobs_in_flight != t.jobs_submitted) {
    throw SimulationError("job accounting does not close");
  }
  for (const MetricsRecord& m : report.resources) {
    if (m.jobs_accepted + m.jobs_dropped + m.jobs_in_flight != m.jobs_submitted) {
      throw SimulationError("job accounting does not close at " + m.name);
    }
  }
}

/// Builds the workload, runs one federation to completion and returns the
/// audited report. `observer`, if set, sees every dispatched event.
inline FederationReport run_experiment(const SimConfig& config,
                                       const Federation::Observer& observer = {}) {
  config.validate();
  JobSet set = build_jobs(config);
  Federation fed(config.resources, set.jobs, federation_options(config));
  if (observer) fed.set_observer(observer);
  fed.run();
  FederationReport report = summarize(fed, set, config);
  audit_report(report);
  return report;
}

/// One independent run per phi value, otherwise identical. Runs execute on up
/// to `parallelism` threads; the result is ordered by phi.
inline std::vector<FederationReport> sweep_phi(const SimConfig& config, std::vector<double> phis,
                                               unsigned parallelism = 1) {
  for (double phi : phis) {
    if (!(phi >= 0 && phi <= 1)) throw ConfigError("sweep phi values must lie in [0, 1]");
  }
  std::stable_sort(phis.begin(), phis.end());
  std::vector<FederationReport> reports(phis.size());
  auto run_one = [&](std::size_t i) {
    SimConfig c = config;
    c.phi = phis[i];
    reports[i] = run_experiment(c);
  };
  if (parallelism <= 1) {
    for (std::size_t i = 0; i < phis.size(); ++i) run_one(i);
    return reports;
  }
  for (std::size_t base = 0; base < phis.size(); base += parallelism) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = base; i < std::min(phis.size(), base + parallelism); ++i) {
      batch.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& f : batch) f.get();
  }
  return reports;
}

// Shortest decimal representation that round-trips, '.' separator.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw SimulationError("number formatting failed");
  return std::string(buf, ptr);
}

inline std::string format_number(std::uint64_t value) { return std::to_string(value); }

inline constexpr const char* kPerResourceHeader =
    "phi,resource,earnings,earnings_per_proc,mi_executed,avg_response,avg_budget,"
    "jobs_accepted,jobs_dropped,local_msgs,remote_msgs";
inline constexpr const char* kFederationHeader =
    "phi,total_earnings,avg_response,avg_budget,avg_msgs_per_job";

struct CsvPaths {
  std::filesystem::path per_resource;
  std::filesystem::path federation;
};

inline std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

inline CsvPaths emit_csv(std::vector<FederationReport> reports, const std::filesystem::path& out_dir) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const FederationReport& a, const FederationReport& b) { return a.phi < b.phi; });
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  CsvPaths paths{out_dir / "per_resource.csv", out_dir / "federation.csv"};

  std::ofstream per(paths.per_resource, std::ios::binary | std::ios::trunc);
  std::ofstream fed(paths.federation, std::ios::binary | std::ios::trunc);
  if (!per || !fed) throw ConfigError("cannot write CSV files in " + out_dir.string());

  per << kPerResourceHeader << '\n';
  fed << kFederationHeader << '\n';
  for (const FederationReport& r : reports) {
    for (const MetricsRecord& m : r.resources) {
      per << format_number(r.phi) << ',' << csv_field(m.name) << ',' << format_number(m.earnings)
          << ',' << format_number(m.earnings_per_processor) << ',' << format_number(m.mi_executed)
          << ',' << format_number(m.avg_response) << ',' << format_number(m.avg_budget) << ','
          << m.jobs_accepted << ',' << m.jobs_dropped << ',' << m.local_messages << ','
          << m.remote_messages << '\n';
    }
    const FederationTotals& t = r.totals;
    fed << format_number(r.phi) << ',' << format_number(t.total_earnings) << ','
        << format_number(t.avg_response) << ',' << format_number(t.avg_budget) << ','
        << format_number(t.avg_messages_per_job) << '\n';
  }
  per.flush();
  fed.flush();
  if (!per || !fed) throw ConfigError("failed writing CSV files in " + out_dir.string());
  return paths;
}

}  // namespace gridfed
