#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aggsim/scenarios.hpp"

namespace aggsim {

enum class ScenarioKind { remark1, congestion, pev };
enum class OutputFormat { csv, json };

// Full description of a sweep: which scenario, which population sizes, how
// many replicates, the residual thresholds to report, seeding and output
// placement. Parsed from an INI-style config file with sections; unknown
// sections or keys are rejected.
struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::remark1;
  std::vector<long> sizes = {100};
  int replicates = 1;
  std::vector<double> thresholds = {1e-2, 1e-3, 1e-4};
  std::uint64_t base_seed = 42;
  int workers = 1;
  std::string out_dir = "out";
  OutputFormat format = OutputFormat::csv;
  long run_size = 0;  // 0 means: first entry of sizes

  CongestionParams congestion;
  PevParams pev;
  double remark1_k_gain = 2.0;

  CoordinatorSettings coordinator;

  std::string scenario_name() const;
  long single_run_size() const { return run_size > 0 ? run_size : sizes.front(); }

  // Builds the population for one experiment of this config.
  std::pair<GamePopulation, Scenario> build(long size, std::uint64_t seed) const;

  std::string to_json() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Applies a "section.key=value" override (used for command-line flags).
void apply_override(ExperimentConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

}  // namespace aggsim
