#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcp/core.hpp"
#include "hetcp/estimators.hpp"
#include "hetcp/nonconformity.hpp"
#include "hetcp/serialization.hpp"
#include "hetcp/synthetic.hpp"
#include "hetcp/taxonomy.hpp"

namespace hetcp::cli {

/// Everything a subcommand may need. Values come from defaults, then the
/// --config JSON file, then explicitly given flags.
struct RunConfig {
  std::optional<GeneratorSpec> generator;
  std::optional<std::string> csv_path;
  EstimatorSpec estimator;
  std::vector<Measure> measures{Measure{MeasureKind::residual}, Measure{MeasureKind::normalized}};
  double alpha = 0.1;
  TaxonomyConfig taxonomy;
  bool mondrian = false;
  int repetitions = 20;
  std::size_t n_test = 1000;
  std::size_t n_cal = 1000;
  std::uint64_t seed = 0;
  std::string output_dir;
  SplitSpec split;
  std::size_t bootstrap_b = 2000;
  double bootstrap_beta = 0.025;
  double ks_level = 0.01;
  /// Unit of quadratic_sigma wrappers on generated data; unset means 2 mean(sigma^2)
  /// of the calibration truths.
  std::optional<double> quadratic_unit;

  /// Exactly one data source, alpha in (0, 1), sane sizes.
  void validate(bool needs_source = true) const;
};

/// Reads a config file. Unknown keys are rejected so typos do not pass silently.
RunConfig load_config(const std::string& path, RunConfig base = {});
RunConfig config_from_json(const json& j, RunConfig base = {});
json to_json(const RunConfig& cfg);

/// --output-dir, else $HETCP_OUTPUT_DIR, else the working directory.
std::string resolve_output_dir(const std::string& flag);

std::vector<Measure> parse_measure_list(const std::string& csv, double epsilon);

}  // namespace hetcp::cli
