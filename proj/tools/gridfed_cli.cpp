// gridfed: run federation experiments, phi sweeps and workload utilities.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridfed/config.hpp"
#include "gridfed/experiment.hpp"
#include "gridfed/workload.hpp"

namespace {

void print_summary(const gridfed::FederationReport& r) {
  const auto& t = r.totals;
  std::printf("phi=%-6s submitted=%llu accepted=%llu dropped=%llu unschedulable=%llu\n",
              gridfed::format_number(r.phi).c_str(), static_cast<unsigned long long>(t.jobs_submitted),
              static_cast<unsigned long long>(t.jobs_accepted),
              static_cast<unsigned long long>(t.jobs_dropped),
              static_cast<unsigned long long>(t.jobs_unschedulable));
  std::printf("  earnings=%.6g  avg_response=%.6g  avg_budget=%.6g  msgs/job=%.4g\n", t.total_earnings,
              t.avg_response, t.avg_budget, t.avg_messages_per_job);
}

std::vector<double> parse_phi_list(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double v = 0;
    if (!gridfed::workload::detail::parse_number(item, v)) {
      throw gridfed::ConfigError("bad --phi entry '" + item + "'");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for SLA-negotiated superscheduling across a federation of clusters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gridfed::kVersion);

  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run one experiment and write the CSV reports");
  run->add_option("--config", config_path, "Experiment config (TOML)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory for per_resource.csv and federation.csv");
  run->add_option("--seed", seed, "Override the config seed");

  std::string phi_list = "0,0.1,0.2,0.3,0.4,0.5";
  unsigned jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run the same experiment for several bid-delay fractions");
  sweep->add_option("--config", config_path, "Experiment config (TOML)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--phi", phi_list, "Comma-separated bid-delay fractions")->capture_default_str();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--seed", seed, "Override the config seed");
  sweep->add_option("--jobs", jobs, "Runs executed in parallel")->check(CLI::PositiveNumber);

  std::string spec_path;
  std::string swf_out;
  auto* gen = app.add_subcommand("gen-workload", "Generate a synthetic SWF trace");
  gen->add_option("--spec", spec_path, "Workload spec (TOML with a [synthetic] table)")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--out", swf_out, "Output SWF file")->required();
  gen->add_option("--seed", seed, "Override the spec seed");

  std::string trace_path;
  auto* validate = app.add_subcommand("validate-trace", "Parse an SWF trace and report skipped rows");
  validate->add_option("--file", trace_path, "SWF trace")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *sweep) {
      gridfed::SimConfig config = gridfed::config::load_config(config_path);
      if (seed) config.seed = *seed;
      std::vector<gridfed::FederationReport> reports;
      if (*run) {
        reports.push_back(gridfed::run_experiment(config));
      } else {
        reports = gridfed::sweep_phi(config, parse_phi_list(phi_list), jobs);
      }
      for (const auto& r : reports) print_summary(r);
      const auto paths = gridfed::emit_csv(reports, out_dir);
      std::printf("wrote %s and %s\n", paths.per_resource.string().c_str(),
                  paths.federation.string().c_str());
    } else if (*gen) {
      auto spec = gridfed::config::load_synthetic_spec(spec_path);
      if (seed) spec.seed = *seed;
      const auto rows = gridfed::workload::synth_generate(spec);
      std::ofstream out(swf_out, std::ios::binary | std::ios::trunc);
      if (!out) throw gridfed::ConfigError("cannot write " + swf_out);
      gridfed::workload::write_swf(out, rows);
      if (!out.flush()) throw gridfed::ConfigError("failed writing " + swf_out);
      std::printf("wrote %zu jobs to %s\n", rows.size(), swf_out.c_str());
    } else if (*validate) {
      const auto trace = gridfed::workload::parse_swf_file(trace_path);
      const auto& r = trace.report;
      std::printf("comment lines:      %zu\n", r.comment_lines);
      std::printf("data rows:          %zu\n", r.data_rows);
      std::printf("valid jobs:         %zu\n", r.accepted);
      std::printf("skipped malformed:  %zu\n", r.skipped_malformed);
      std::printf("skipped invalid:    %zu\n", r.skipped_invalid);
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "gridfed: %s\n", err.what());
    return 1;
  }
  return 0;
}
