#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridfed/economy.hpp"
#include "gridfed/model.hpp"

namespace gridfed::workload {

// The four SWF columns the simulator consumes.
struct TraceJob {
  std::int64_t job_index = 0;
  std::int64_t submit_time = 0;
  std::int64_t run_time = 0;
  std::int64_t processors = 0;

  bool operator==(const TraceJob&) const = default;
};

struct SwfLoadReport {
  std::size_t comment_lines = 0;
  std::size_t data_rows = 0;
  std::size_t accepted = 0;
  std::size_t skipped_malformed = 0;  // too few columns or non-numeric fields
  std::size_t skipped_invalid = 0;    // run_time/processors missing or non-positive

  std::size_t skipped() const { return skipped_malformed + skipped_invalid; }
};

struct SwfTrace {
  std::vector<TraceJob> jobs;
  SwfLoadReport report;
};

namespace detail {

inline bool parse_number(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace detail

// Reads Standard Workload Format rows. Columns are 1-based in the SWF
// convention: 1 job number, 2 submit time, 4 run time, 5 allocated processors.
inline SwfTrace parse_swf(std::istream& in) {
  SwfTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    if (line[begin] == ';') {
      ++trace.report.comment_lines;
      continue;
    }
    ++trace.report.data_rows;

    std::istringstream fields(line);
    std::vector<double> cols;
    std::string token;
    bool numeric = true;
    while (cols.size() < 5 && fields >> token) {
      double v = 0;
      if (!detail::parse_number(token, v)) {
        numeric = false;
        break;
      }
      cols.push_back(v);
    }
    if (!numeric || cols.size() < 5) {
      ++trace.report.skipped_malformed;
      continue;
    }
    TraceJob job{static_cast<std::int64_t>(cols[0]), static_cast<std::int64_t>(cols[1]),
                 static_cast<std::int64_t>(cols[3]), static_cast<std::int64_t>(cols[4])};
    // SWF encodes unknown values as -1.
    if (job.run_time <= 0 || job.processors <= 0 || job.submit_time < 0 || job.job_index <= 0) {
      ++trace.report.skipped_invalid;
      continue;
    }
    trace.jobs.push_back(job);
    ++trace.report.accepted;
  }
  return trace;
}

inline SwfTrace parse_swf_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read SWF trace: " + path.string());
  }
  return parse_swf(in);
}

// Writes all 18 SWF columns; the ones this simulator does not model are -1.
inline void write_swf(std::ostream& out, std::span<const TraceJob> jobs) {
  out << "; Version: 2.2\n";
  out << "; Note: generated by gridfed; only columns 1, 2, 4 and 5 are meaningful\n";
  for (const TraceJob& j : jobs) {
    out << j.job_index << ' ' << j.submit_time << " -1 " << j.run_time << ' ' << j.processors;
    for (int col = 6; col <= 18; ++col) out << " -1";
    out << '\n';
  }
}

struct ProcessorWeight {
  std::int64_t processors = 1;
  double weight = 1.0;
};

struct SyntheticSpec {
  std::size_t job_count = 0;
  double mean_interarrival = 60.0;
  double mean_runtime = 600.0;
  std::vector<ProcessorWeight> processors{{1, 1.0}};
  std::optional<std::uint64_t> seed;

  // Everything but the seed, which a run may supply later.
  void validate_shape() const {
    if (!(mean_interarrival > 0) || !(mean_runtime > 0)) {
      throw ConfigError("synthetic workload means must be strictly positive");
    }
    if (processors.empty()) {
      throw ConfigError("synthetic workload needs a processor distribution");
    }
    for (const ProcessorWeight& pw : processors) {
      if (pw.processors < 1 || !(pw.weight > 0)) {
        throw ConfigError("processor distribution entries need processors >= 1 and weight > 0");
      }
    }
  }

  void validate() const {
    validate_shape();
    if (!seed) throw ConfigError("synthetic workload needs a seed");
  }
};

struct TraceSource {
  std::filesystem::path path;
  std::int64_t window_start = 0;
};

struct WorkloadSpec {
  std::variant<TraceSource, SyntheticSpec> source;
};

/// Poisson arrivals with exponential run times (at least one sim unit) and
/// widths drawn from a weighted discrete distribution. Deterministic per seed.
inline std::vector<TraceJob> synth_generate(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(*spec.seed);
  std::exponential_distribution<double> gap(1.0 / spec.mean_interarrival);
  std::exponential_distribution<double> runtime(1.0 / spec.mean_runtime);
  std::vector<double> weights;
  for (const ProcessorWeight& pw : spec.processors) weights.push_back(pw.weight);
  std::discrete_distribution<std::size_t> width(weights.begin(), weights.end());

  std::vector<TraceJob> jobs;
  jobs.reserve(spec.job_count);
  double clock = 0;
  for (std::size_t i = 0; i < spec.job_count; ++i) {
    clock += gap(rng);
    const double run = runtime(rng);
    const std::size_t w = width(rng);
    jobs.push_back(TraceJob{static_cast<std::int64_t>(i + 1), std::llround(clock),
                            std::max<std::int64_t>(1, std::llround(run)),
                            spec.processors[w].processors});
  }
  return jobs;
}

// Keeps rows submitted in [start, start + length) and rebases them to start at 0.
inline std::vector<TraceJob> select_window(std::span<const TraceJob> jobs, std::int64_t start,
                                           SimTime length) {
  std::vector<TraceJob> out;
  for (const TraceJob& j : jobs) {
    const auto offset = static_cast<double>(j.submit_time - start);
    if (j.submit_time >= start && offset < length) {
      TraceJob shifted = j;
      shifted.submit_time -= start;
      out.push_back(shifted);
    }
  }
  return out;
}

/// Converts a trace row into a federation job. Length is chosen so the job's
/// compute time on its origin equals the trace run time.
inline Job to_job(const TraceJob& row, const ResourceSpec& origin, const EconomyParams& params) {
  if (!(origin.mips > 0)) {
    throw ConfigError("origin resource " + origin.name + " has no MIPS rating");
  }
  Job job;
  job.id = JobId{row.job_index, 1, origin.id};
  job.origin = origin.id;
  job.processors = row.processors;
  job.length_mi = static_cast<double>(row.run_time) * origin.mips;
  job.comm_overhead = params.comm_fraction;
  job.submit_time = static_cast<SimTime>(row.submit_time);
  // Budget and deadline are priced on the origin regardless of its width, so
  // evaluate them as if the origin could host the job.
  ResourceSpec wide = origin;
  wide.processors = std::max(origin.processors, job.processors);
  job.budget = economy::assign_budget(job, wide, params);
  job.deadline = economy::assign_deadline(job, wide, params);
  return job;
}

inline bool fits_somewhere(const Job& job, std::span<const ResourceSpec> resources) {
  return std::any_of(resources.begin(), resources.end(),
                     [&](const ResourceSpec& r) { return r.processors >= job.processors; });
}

}  // namespace gridfed::workload
