#pragma once

// Experiment configuration files (TOML). The schema is documented in
// docs/config.md; unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "gridfed/experiment.hpp"

namespace gridfed::config {

namespace detail {

inline void check_keys(const toml::table& table, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : table) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key.str() == a;
    if (!known) {
      throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + std::string(where));
    }
  }
}

inline double get_double(const toml::table& t, std::string_view key, std::string_view where,
                         std::optional<double> fallback = std::nullopt) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + std::string(key) + "' in " + std::string(where));
  }
  if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) return *v;
  throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " must be a number");
}

inline std::int64_t get_int(const toml::table& t, std::string_view key, std::string_view where,
                            std::optional<std::int64_t> fallback = std::nullopt) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + std::string(key) + "' in " + std::string(where));
  }
  if (!node->is_integer()) {
    throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " must be an integer");
  }
  return *node->value<std::int64_t>();
}

inline bool get_bool(const toml::table& t, std::string_view key, std::string_view where, bool fallback) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return fallback;
  if (!node->is_boolean()) {
    throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " must be a boolean");
  }
  return *node->value<bool>();
}

inline std::string get_string(const toml::table& t, std::string_view key, std::string_view where,
                              std::optional<std::string> fallback = std::nullopt) {
  const toml::node* node = t.get(key);
  if (node == nullptr) {
    if (fallback) return *fallback;
    throw ConfigError("missing required field '" + std::string(key) + "' in " + std::string(where));
  }
  if (!node->is_string()) {
    throw ConfigError("field '" + std::string(key) + "' in " + std::string(where) + " must be a string");
  }
  return *node->value<std::string>();
}

inline std::uint64_t to_seed(std::int64_t raw, std::string_view where) {
  if (raw < 0) throw ConfigError("seed in " + std::string(where) + " must be non-negative");
  return static_cast<std::uint64_t>(raw);
}

}  // namespace detail

/// Synthetic workload table: jobs, mean_interarrival, mean_runtime,
/// processors = [[width, weight], ...], optional seed.
inline workload::SyntheticSpec parse_synthetic(const toml::table& t, std::string_view where) {
  detail::check_keys(t, where, {"jobs", "mean_interarrival", "mean_runtime", "processors", "seed"});
  workload::SyntheticSpec spec;
  const std::int64_t jobs = detail::get_int(t, "jobs", where);
  if (jobs < 0) throw ConfigError("jobs in " + std::string(where) + " must be >= 0");
  spec.job_count = static_cast<std::size_t>(jobs);
  spec.mean_interarrival = detail::get_double(t, "mean_interarrival", where);
  spec.mean_runtime = detail::get_double(t, "mean_runtime", where);
  if (t.contains("seed")) spec.seed = detail::to_seed(detail::get_int(t, "seed", where), where);
  const toml::array* widths = t.get_as<toml::array>("processors");
  if (widths == nullptr) {
    throw ConfigError("missing required field 'processors' in " + std::string(where));
  }
  spec.processors.clear();
  for (const toml::node& entry : *widths) {
    const toml::array* pair = entry.as_array();
    if (pair == nullptr || pair->size() != 2 || !(*pair)[0].is_integer() ||
        !(*pair)[1].value<double>()) {
      throw ConfigError("processors in " + std::string(where) + " must be [[width, weight], ...]");
    }
    spec.processors.push_back({*(*pair)[0].value<std::int64_t>(), *(*pair)[1].value<double>()});
  }
  spec.validate_shape();
  return spec;
}

inline SimConfig from_table(const toml::table& root, const std::filesystem::path& base_dir) {
  using detail::get_bool;
  using detail::get_double;
  using detail::get_int;
  using detail::get_string;

  detail::check_keys(root, "config",
                     {"seed", "phi", "user_mix", "policy", "horizon", "hard_stop", "min_bid_interval",
                      "submission_delay", "return_delay", "directory_latency", "economy", "resources"});
  SimConfig c;
  c.seed = detail::to_seed(get_int(root, "seed", "config"), "config");
  c.phi = get_double(root, "phi", "config", 0.0);
  c.user_mix = get_double(root, "user_mix", "config", 1.0);
  c.horizon = get_double(root, "horizon", "config", 4 * 86400.0);
  c.hard_stop = get_bool(root, "hard_stop", "config", false);
  c.min_bid_interval = get_double(root, "min_bid_interval", "config", 1.0);
  c.submission_delay = get_double(root, "submission_delay", "config", 0.0);
  c.return_delay = get_double(root, "return_delay", "config", 0.0);
  c.directory_latency = get_double(root, "directory_latency", "config", 0.0);
  const std::string policy = get_string(root, "policy", "config", "greedy");
  if (policy == "greedy") {
    c.policy = AdmissionPolicy::GreedyBackfilling;
  } else if (policy == "fcfs") {
    c.policy = AdmissionPolicy::Fcfs;
  } else {
    throw ConfigError("policy must be \"greedy\" or \"fcfs\", got \"" + policy + "\"");
  }

  if (const toml::node* node = root.get("economy")) {
    const toml::table* e = node->as_table();
    if (e == nullptr) throw ConfigError("[economy] must be a table");
    detail::check_keys(*e, "[economy]",
                       {"access_price", "fastest_mips", "budget_multiplier", "deadline_multiplier",
                        "comm_fraction"});
    const EconomyParams d;
    c.economy.access_price = get_double(*e, "access_price", "[economy]", d.access_price);
    c.economy.fastest_mips = get_double(*e, "fastest_mips", "[economy]", d.fastest_mips);
    c.economy.budget_multiplier = get_double(*e, "budget_multiplier", "[economy]", d.budget_multiplier);
    c.economy.deadline_multiplier =
        get_double(*e, "deadline_multiplier", "[economy]", d.deadline_multiplier);
    c.economy.comm_fraction = get_double(*e, "comm_fraction", "[economy]", d.comm_fraction);
  }

  const toml::array* resources = root.get_as<toml::array>("resources");
  if (resources == nullptr || resources->empty()) {
    throw ConfigError("missing required field 'resources' (use [[resources]] tables)");
  }
  for (const toml::node& node : *resources) {
    const toml::table* r = node.as_table();
    if (r == nullptr) throw ConfigError("each [[resources]] entry must be a table");
    const std::string where = "[[resources]] #" + std::to_string(c.resources.size() + 1);
    detail::check_keys(*r, where, {"name", "processors", "mips", "price", "bandwidth", "workload"});
    ResourceSpec spec;
    spec.id = static_cast<ResourceId>(c.resources.size());
    spec.name = get_string(*r, "name", where);
    spec.processors = get_int(*r, "processors", where);
    spec.mips = get_double(*r, "mips", where);
    spec.bandwidth = get_double(*r, "bandwidth", where, 0.0);
    // Without an explicit price the resource is priced linearly in its MIPS.
    spec.price = r->contains("price") ? get_double(*r, "price", where)
                                      : economy::quote_price(spec.mips, c.economy);

    const toml::table* w = r->get_as<toml::table>("workload");
    if (w == nullptr) throw ConfigError("missing required table 'workload' in " + where);
    workload::WorkloadSpec ws;
    const std::string wwhere = where + ".workload";
    if (w->contains("trace")) {
      detail::check_keys(*w, wwhere, {"trace", "window_start"});
      std::filesystem::path path = get_string(*w, "trace", wwhere);
      if (path.is_relative()) path = base_dir / path;
      ws.source = workload::TraceSource{path, get_int(*w, "window_start", wwhere, 0)};
    } else {
      ws.source = parse_synthetic(*w, wwhere);
    }
    c.resources.push_back(spec);
    c.workloads.push_back(ws);
  }
  c.validate();
  return c;
}

inline SimConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".") {
  try {
    return from_table(toml::parse(text), base_dir);
  } catch (const toml::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + std::string(err.description()));
  }
}

inline SimConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("cannot read config file: " + path.string());
  }
  try {
    return from_table(toml::parse_file(path.string()), path.parent_path());
  } catch (const toml::parse_error& err) {
    throw ConfigError("config parse error in " + path.string() + ": " + std::string(err.description()));
  }
}

// Spec file for gen-workload: a single [synthetic] table.
inline workload::SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("cannot read workload spec: " + path.string());
  }
  try {
    const toml::table root = toml::parse_file(path.string());
    detail::check_keys(root, path.string(), {"synthetic"});
    const toml::table* t = root.get_as<toml::table>("synthetic");
    if (t == nullptr) throw ConfigError("missing required table [synthetic] in " + path.string());
    auto spec = parse_synthetic(*t, "[synthetic]");
    if (!spec.seed) throw ConfigError("[synthetic] needs a seed");
    return spec;
  } catch (const toml::parse_error& err) {
    throw ConfigError("workload spec parse error: " + std::string(err.description()));
  }
}

}  // namespace gridfed::config
