#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "gridfed/workload.hpp"

namespace {

using namespace gridfed;
using workload::TraceJob;

workload::SwfTrace parse(const std::string& text) {
  std::istringstream in(text);
  return workload::parse_swf(in);
}

TEST(Swf, ReadsThePositionalColumns) {
  const auto t = parse("1 0 0 120 4 -1 -1 4 -1 -1 1 3 1 -1 1 -1 -1 -1\n");
  ASSERT_EQ(t.jobs.size(), 1u);
  EXPECT_EQ(t.jobs[0], (TraceJob{1, 0, 120, 4}));
}

TEST(Swf, SkipsCommentsAndMissingValues) {
  const auto t = parse(
      "; Version: 2\n"
      ";   MaxNodes: 128\n"
      "\n"
      "1 10 5 -1 4\n"       // unknown run time
      "2 20 5 60 -1\n"      // unknown width
      "3 30 5 0 4\n"        // zero run time
      "4 40 5 60 8\n");
  EXPECT_EQ(t.report.comment_lines, 2u);
  EXPECT_EQ(t.report.data_rows, 4u);
  EXPECT_EQ(t.report.skipped_invalid, 3u);
  ASSERT_EQ(t.jobs.size(), 1u);
  EXPECT_EQ(t.jobs[0], (TraceJob{4, 40, 60, 8}));
}

TEST(Swf, CountsMalformedRows) {
  const auto t = parse("1 2 3\nx 0 0 10 1\n5 0 0 10 1\n");
  EXPECT_EQ(t.report.skipped_malformed, 2u);
  EXPECT_EQ(t.report.accepted, 1u);
  EXPECT_EQ(t.report.skipped(), 2u);
}

TEST(Swf, UnreadableFileIsFatal) {
  EXPECT_THROW(workload::parse_swf_file("/nonexistent/trace.swf"), ConfigError);
}

// Writing then reading any valid job list gives it back.
TEST(Swf, PropertyRoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TraceJob> jobs;
    const int n = std::uniform_int_distribution<int>(0, 40)(rng);
    std::int64_t clock = 0;
    for (int i = 0; i < n; ++i) {
      clock += std::uniform_int_distribution<std::int64_t>(0, 1000)(rng);
      jobs.push_back({i + 1, clock, std::uniform_int_distribution<std::int64_t>(1, 100000)(rng),
                      std::uniform_int_distribution<std::int64_t>(1, 2048)(rng)});
    }
    std::stringstream buf;
    workload::write_swf(buf, jobs);
    const auto back = workload::parse_swf(buf);
    EXPECT_EQ(back.jobs, jobs);
    EXPECT_EQ(back.report.skipped(), 0u);
  }
}

ResourceSpec ctc() {
  ResourceSpec r;
  r.id = 2;
  r.name = "CTC SP2";
  r.processors = 512;
  r.mips = 850;
  r.price = 4.84;
  return r;
}

TEST(ToJob, LengthIsRunTimeTimesOriginMips) {
  const EconomyParams p;
  const Job j = workload::to_job(TraceJob{7, 30, 100, 4}, ctc(), p);
  EXPECT_DOUBLE_EQ(j.length_mi, 85000.0);
  EXPECT_DOUBLE_EQ(j.comm_overhead, 0.10);
  EXPECT_EQ(j.processors, 4);
  EXPECT_EQ(j.id, (JobId{7, 1, 2}));
  EXPECT_EQ(j.origin, 2u);
  EXPECT_DOUBLE_EQ(j.submit_time, 30.0);
  EXPECT_NEAR(j.deadline, 330.0, 1e-9);
  EXPECT_NEAR(j.budget, 4259.2, 1e-9);
}

TEST(ToJob, UnitRating) {
  ResourceSpec unit;
  unit.mips = 1;
  unit.price = 1;
  const Job j = workload::to_job(TraceJob{1, 0, 1, 1}, unit, EconomyParams{});
  EXPECT_DOUBLE_EQ(j.length_mi, 1.0);
}

TEST(ToJob, EveryJobGetsTheConfiguredOverhead) {
  EconomyParams p;
  for (std::int64_t rt : {1, 10, 1000}) {
    EXPECT_DOUBLE_EQ(workload::to_job(TraceJob{1, 0, rt, 1}, ctc(), p).comm_overhead, 0.10);
  }
  p.comm_fraction = 0.25;
  EXPECT_DOUBLE_EQ(workload::to_job(TraceJob{1, 0, 5, 1}, ctc(), p).comm_overhead, 0.25);
}

TEST(ToJob, WiderThanOriginStillGetsSlaParameters) {
  ResourceSpec small = ctc();
  small.processors = 2;
  const Job j = workload::to_job(TraceJob{1, 0, 100, 8}, small, EconomyParams{});
  EXPECT_NEAR(j.deadline, 330.0, 1e-9);
  std::vector<ResourceSpec> fed{small};
  EXPECT_FALSE(workload::fits_somewhere(j, fed));
  fed.push_back(ctc());
  EXPECT_TRUE(workload::fits_somewhere(j, fed));
}

workload::SyntheticSpec spec(std::size_t count, std::uint64_t seed = 11) {
  workload::SyntheticSpec s;
  s.job_count = count;
  s.mean_interarrival = 60;
  s.mean_runtime = 600;
  s.processors = {{1, 0.5}, {4, 0.3}, {16, 0.2}};
  s.seed = seed;
  return s;
}

TEST(Synthetic, EmptyWhenCountIsZero) { EXPECT_TRUE(workload::synth_generate(spec(0)).empty()); }

TEST(Synthetic, DeterministicPerSeed) {
  EXPECT_EQ(workload::synth_generate(spec(200)), workload::synth_generate(spec(200)));
  EXPECT_NE(workload::synth_generate(spec(200, 1)), workload::synth_generate(spec(200, 2)));
}

TEST(Synthetic, InterArrivalMeanWithinFifteenPercent) {
  const auto jobs = workload::synth_generate(spec(500));
  ASSERT_EQ(jobs.size(), 500u);
  // Mean gap over the generated list: the last submit time spans 500 gaps.
  const double mean_gap = static_cast<double>(jobs.back().submit_time) / 500.0;
  EXPECT_NEAR(mean_gap, 60.0, 0.15 * 60.0);
}

TEST(Synthetic, RowsAreValidAndDrawnFromTheDistribution) {
  const auto jobs = workload::synth_generate(spec(2000));
  std::set<std::int64_t> widths;
  std::int64_t last = 0;
  for (const auto& j : jobs) {
    EXPECT_GE(j.run_time, 1);
    EXPECT_GE(j.submit_time, last);
    last = j.submit_time;
    widths.insert(j.processors);
  }
  EXPECT_EQ(widths, (std::set<std::int64_t>{1, 4, 16}));
}

TEST(Synthetic, InvalidSpecsAreRejected) {
  auto s = spec(10);
  s.mean_runtime = 0;
  EXPECT_THROW(workload::synth_generate(s), ConfigError);
  s = spec(10);
  s.seed.reset();
  EXPECT_THROW(workload::synth_generate(s), ConfigError);
  s = spec(10);
  s.processors = {{0, 1.0}};
  EXPECT_THROW(workload::synth_generate(s), ConfigError);
}

TEST(Window, SelectsAndRebases) {
  const std::vector<TraceJob> rows{{1, 5, 10, 1}, {2, 100, 10, 1}, {3, 150, 10, 1}, {4, 200, 10, 1}};
  const auto w = workload::select_window(rows, 100, 100);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], (TraceJob{2, 0, 10, 1}));
  EXPECT_EQ(w[1], (TraceJob{3, 50, 10, 1}));
}

}  // namespace
