#include <gtest/gtest.h>

#include "gridfed/economy.hpp"
#include "gridfed/federation.hpp"
#include "oracles.hpp"

namespace {

using namespace gridfed;

Job job_with_deadline(SimTime deadline) {
  Job j;
  j.deadline = deadline;
  j.processors = 1;
  j.length_mi = 1;
  return j;
}

TEST(Negotiation, DeadlineSplit) {
  auto st = init_negotiation(job_with_deadline(300), 0, 0.5, 0, 0);
  EXPECT_DOUBLE_EQ(st.negotiation_budget, 150.0);
  EXPECT_DOUBLE_EQ(st.expected_response, 150.0);
  EXPECT_EQ(st.status, NegotiationStatus::Bidding);

  st = init_negotiation(job_with_deadline(300), 0, 0.0, 0, 0);
  EXPECT_DOUBLE_EQ(st.negotiation_budget, 0.0);
  EXPECT_DOUBLE_EQ(st.expected_response, 300.0);

  st = init_negotiation(job_with_deadline(200), 0, 0.5, 5, 5);
  EXPECT_DOUBLE_EQ(st.negotiation_budget, 100.0);
  EXPECT_DOUBLE_EQ(st.expected_response, 90.0);
}

TEST(Negotiation, InfeasibleSplitIsDropped) {
  const auto st = init_negotiation(job_with_deadline(10), 0, 0.5, 3, 2);
  EXPECT_EQ(st.status, NegotiationStatus::Dropped);
  EXPECT_EQ(st.drop_reason, DropReason::InfeasibleSplit);
}

TEST(Negotiation, HalvingIntervals) {
  NegotiationState st;
  st.negotiation_budget = 120;
  EXPECT_DOUBLE_EQ(tau_next_interval(st), 60.0);
  st.consumed += 60;
  EXPECT_DOUBLE_EQ(tau_next_interval(st), 30.0);
  st.consumed += 30;
  EXPECT_DOUBLE_EQ(tau_next_interval(st), 15.0);
  for (int l = 1; l <= 40; ++l) {
    NegotiationState s;
    s.negotiation_budget = 120;
    s.consumed = oracle::halving_partial_sum(120, l - 1);
    EXPECT_NEAR(tau_next_interval(s), oracle::halving_window(120, l), 1e-12 * 120);
  }
}

std::vector<ResourceSpec> federation8_resources() {
  std::vector<ResourceSpec> out;
  const EconomyParams p;
  for (const auto& row : oracle::resource_table()) {
    ResourceSpec r;
    r.id = static_cast<ResourceId>(out.size());
    r.name = row.name;
    r.processors = row.processors;
    r.mips = row.mips;
    r.price = economy::quote_price(row.mips, p);
    out.push_back(r);
  }
  return out;
}

// A job no resource can finish in time: every bid expires unanswered.
Job hopeless_job(ResourceId origin, Strategy s) {
  Job j;
  j.id = JobId{0, 1, origin};
  j.origin = origin;
  j.processors = 1;
  j.length_mi = 930 * 150.0;  // 150 on the fastest resource
  j.deadline = 200;           // with phi 0.5 only 100 is left for execution
  j.strategy = s;
  return j;
}

FederationOptions greedy_options(double phi) {
  FederationOptions o;
  o.negotiation.phi = phi;
  o.negotiation.immediate_decisions = false;
  o.negotiation.min_bid_interval = 1;
  return o;
}

TEST(Superscheduler, TimeOptimizingWalkFollowsSpeedRanking) {
  Federation fed(federation8_resources(), {hopeless_job(0, Strategy::OptimizeForTime)}, greedy_options(0.5));
  fed.run();
  const NegotiationState* st = fed.negotiation(0);
  ASSERT_NE(st, nullptr);
  ASSERT_GE(st->contacted.size(), 2u);
  EXPECT_EQ(fed.resources()[st->contacted[0]].name, "NASA iPSC");
  EXPECT_EQ(fed.resources()[st->contacted[1]].name, "SDSC SP2");
}

TEST(Superscheduler, CostOptimizingWalkStartsAtCheapest) {
  Federation fed(federation8_resources(), {hopeless_job(2, Strategy::OptimizeForCost)}, greedy_options(0.5));
  fed.run();
  EXPECT_EQ(fed.resources()[fed.negotiation(0)->contacted[0]].name, "LANL Origin");
}

TEST(Superscheduler, BudgetExhaustionAfterHalvingWindows) {
  // t_neg = 100, floor 1: windows 50, 25, ..., 1.5625, then 0.78 < 1 stops.
  Federation fed(federation8_resources(), {hopeless_job(0, Strategy::OptimizeForTime)}, greedy_options(0.5));
  fed.run();
  const NegotiationState* st = fed.negotiation(0);
  EXPECT_EQ(st->status, NegotiationStatus::Dropped);
  EXPECT_EQ(st->drop_reason, DropReason::BudgetExhausted);
  ASSERT_EQ(st->windows.size(), 6u);
  for (std::size_t i = 0; i < st->windows.size(); ++i) {
    EXPECT_NEAR(st->windows[i], oracle::halving_window(100, static_cast<int>(i) + 1), 1e-12);
  }
  EXPECT_EQ(st->messages.bids, 6u);
  EXPECT_EQ(st->messages.replies, 0u);
  EXPECT_EQ(st->messages.total(), 6u);
  EXPECT_NEAR(st->decided_at, oracle::halving_partial_sum(100, 6), 1e-9);
}

TEST(Superscheduler, WalkWrapsAroundRanking) {
  auto res = federation8_resources();
  res.resize(2);  // CTC SP2 (850), KTH SP2 (900)
  Federation fed(res, {hopeless_job(0, Strategy::OptimizeForTime)}, greedy_options(0.5));
  fed.run();
  EXPECT_EQ(fed.negotiation(0)->contacted, (std::vector<ResourceId>{1, 0, 1, 0, 1, 0}));
}

struct Harness {
  FederationEngine engine;
  Directory directory;
  std::vector<Job> jobs;
  std::unique_ptr<Superscheduler> manager;

  explicit Harness(NegotiationPolicy policy, std::size_t resources = 3) {
    for (ResourceId r = 0; r < resources; ++r) directory.subscribe(Quote{r, 1.0 + r, 100.0 - r, 8});
    jobs.push_back(job_with_deadline(200));
    manager = std::make_unique<Superscheduler>(0, policy, directory, engine, jobs);
  }

  void advance_to(SimTime t) {
    engine.schedule(t, EventKind::JobSubmit, Message{});
    engine.run_until(t, [](const auto&) {});
  }
};

TEST(Superscheduler, EarlyRejectChargesOnlyElapsedTime) {
  NegotiationPolicy policy;
  policy.phi = 0.5;
  policy.immediate_decisions = false;
  Harness h(policy);
  h.manager->on_job_submit(0);
  const SlaBid first = *h.manager->negotiation(0)->outstanding;
  EXPECT_DOUBLE_EQ(first.window, 50.0);
  h.advance_to(10);
  h.manager->on_bid_reply(first, false);
  const NegotiationState* st = h.manager->negotiation(0);
  EXPECT_DOUBLE_EQ(st->consumed, 10.0);
  ASSERT_TRUE(st->outstanding.has_value());
  EXPECT_DOUBLE_EQ(st->outstanding->window, 45.0);
  EXPECT_EQ(st->outstanding->iteration, 2u);
}

TEST(Superscheduler, StaleRepliesAreDiscarded) {
  NegotiationPolicy policy;
  policy.phi = 0.5;
  policy.immediate_decisions = false;
  Harness h(policy);
  h.manager->on_job_submit(0);
  const SlaBid first = *h.manager->negotiation(0)->outstanding;
  h.manager->on_bid_timeout(first);
  h.manager->on_bid_reply(first, true);
  EXPECT_EQ(h.manager->stale_replies(), 1u);
  EXPECT_EQ(h.manager->negotiation(0)->status, NegotiationStatus::Bidding);
  EXPECT_THROW(h.manager->on_job_submit(0), SimulationError);
}

TEST(Superscheduler, ImmediateModeMakesOnePass) {
  NegotiationPolicy policy;
  policy.immediate_decisions = true;
  Harness h(policy, 3);
  h.manager->on_job_submit(0);
  for (int i = 0; i < 3; ++i) {
    const SlaBid bid = *h.manager->negotiation(0)->outstanding;
    EXPECT_DOUBLE_EQ(bid.window, 0.0);
    h.manager->on_bid_reply(bid, false);
  }
  const NegotiationState* st = h.manager->negotiation(0);
  EXPECT_EQ(st->status, NegotiationStatus::Dropped);
  EXPECT_EQ(st->drop_reason, DropReason::PassLimit);
  EXPECT_EQ(st->contacted, (std::vector<ResourceId>{0, 1, 2}));
  EXPECT_EQ(st->messages.total(), 6u);
}

TEST(Superscheduler, NoWideEnoughResource) {
  NegotiationPolicy policy;
  Harness h(policy);
  h.jobs[0].processors = 64;
  h.manager->on_job_submit(0);
  EXPECT_EQ(h.manager->negotiation(0)->drop_reason, DropReason::NoEligibleResource);
}

TEST(Superscheduler, ResultForUnacceptedJobIsAnError) {
  NegotiationPolicy policy;
  Harness h(policy);
  EXPECT_THROW(h.manager->on_result_return(0), SimulationError);
}

}  // namespace
