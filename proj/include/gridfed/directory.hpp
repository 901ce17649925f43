#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gridfed/model.hpp"

namespace gridfed {

// A resource's advertisement in the federation directory.
struct Quote {
  ResourceId resource = 0;
  double price = 0;
  double mips = 0;
  std::int64_t processors = 0;

  bool operator==(const Quote&) const = default;
};

inline Quote quote_of(const ResourceSpec& r) { return Quote{r.id, r.price, r.mips, r.processors}; }

// In-memory stand-in for the shared federation directory: one live quote per
// resource, answering "k-th fastest" (OFT) and "k-th cheapest" (OFC) queries.
class Directory {
 public:
  explicit Directory(SimTime query_latency = 0) : query_latency_(query_latency) {}

  void subscribe(const Quote& quote) { quotes_[quote.resource] = quote; }

  bool unsubscribe(ResourceId resource) { return quotes_.erase(resource) > 0; }

  std::size_t size() const { return quotes_.size(); }

  SimTime query_latency() const { return query_latency_; }

  // Eligible quotes (processors >= min_processors) in rank order.
  std::vector<Quote> ranking(Strategy strategy, std::int64_t min_processors) const {
    std::vector<Quote> eligible;
    for (const auto& [id, q] : quotes_) {
      if (q.processors >= min_processors) eligible.push_back(q);
    }
    // quotes_ iterates by ascending id, so stable_sort keeps the id tie-break.
    if (strategy == Strategy::OptimizeForTime) {
      std::stable_sort(eligible.begin(), eligible.end(),
                       [](const Quote& a, const Quote& b) { return a.mips > b.mips; });
    } else {
      std::stable_sort(eligible.begin(), eligible.end(),
                       [](const Quote& a, const Quote& b) { return a.price < b.price; });
    }
    return eligible;
  }

  std::size_t eligible_count(std::int64_t min_processors) const {
    return static_cast<std::size_t>(std::count_if(quotes_.begin(), quotes_.end(), [&](const auto& kv) {
      return kv.second.processors >= min_processors;
    }));
  }

  // 1-based rank; nullopt once k exceeds the eligible set.
  std::optional<Quote> query_kth(Strategy strategy, std::size_t k, std::int64_t min_processors) const {
    if (k == 0) return std::nullopt;
    const auto ranked = ranking(strategy, min_processors);
    if (k > ranked.size()) return std::nullopt;
    return ranked[k - 1];
  }

 private:
  SimTime query_latency_;
  std::map<ResourceId, Quote> quotes_;
};

}  // namespace gridfed
