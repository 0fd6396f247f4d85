#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hetcp/conformal.hpp"
#include "hetcp/diagnostics.hpp"
#include "hetcp/metrics.hpp"
#include "hetcp/synthetic.hpp"

namespace hetcp::cli {

/// Repeated calibrate/evaluate runs on fresh synthetic calibration and test sets.
struct SyntheticExperiment {
  GeneratorSpec generator;
  EstimatorSpec estimator;
  TaxonomyConfig taxonomy;
  std::vector<Measure> measures;
  double alpha = 0.1;
  int repetitions = 20;
  std::size_t n_cal = 1000;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;
  bool global = true;
  bool mondrian = true;
  /// Sets the unit of every quadratic_sigma wrapper to 2 mean(sigma^2) of the
  /// calibration truths, which centres the quadratic on the data.
  bool quadratic_unit_from_data = false;
};

struct ExperimentCell {
  Measure measure;
  bool mondrian = false;
  std::vector<EvalReport> reports;  // one per repetition
  std::vector<MetricSummary> summary;
};

std::vector<ExperimentCell> run_synthetic_experiment(const SyntheticExperiment& cfg);

/// Split protocol on a real dataset: per repetition a fresh train/calibration/test
/// split, a k-NN (or other) estimator fitted on train, taxonomy edges on calibration.
struct CsvExperiment {
  EstimatorSpec estimator;
  TaxonomyConfig taxonomy;
  std::vector<Measure> measures;
  double alpha = 0.1;
  int repetitions = 1;
  SplitSpec split;
  bool global = true;
  bool mondrian = true;
};

std::vector<ExperimentCell> run_csv_experiment(const Dataset& data, const CsvExperiment& cfg);

/// Long format: <prefix columns>,measure,mondrian,class,metric,mean,std
void write_cells_csv(std::ostream& out, const std::vector<ExperimentCell>& cells, bool header = true,
                     const std::string& prefix = "", const std::string& prefix_header = "");

struct TableOptions {
  double alpha = 0.1;
  int repetitions = 20;
  std::size_t n_test = 1000;
  std::size_t n_cal = 1000;
  int dim = 15;
  int n_bins = 3;
  bool quadratic = false;
  std::vector<Measure> measures{Measure{MeasureKind::residual}, Measure{MeasureKind::normalized}};
  std::uint64_t seed = 0;
  bool mondrian = true;
};

/// Toy-model coverage table: oracle (or quadratic misspecified) estimator,
/// equal-frequency sigma_hat classes fitted on each calibration set.
std::vector<ExperimentCell> run_table(const TableOptions& opt);

struct MisspecColumn {
  std::string name;
  std::vector<MisspecOp> wrappers;
};

/// oracle, sigma_shift 0.01/0.1/1, sigma_scale 5, mu_shift_const 1, mu_shift_prop 1.
std::vector<MisspecColumn> default_misspec_columns();

struct SweepOptions {
  std::vector<GeneratorType> types{GeneratorType::type1_const_mean, GeneratorType::type2_functional,
                                   GeneratorType::type3_lowdim, GeneratorType::type4_bimodal};
  std::vector<MisspecColumn> columns = default_misspec_columns();
  std::vector<Measure> measures{Measure{MeasureKind::residual}, Measure{MeasureKind::interval},
                                Measure{MeasureKind::normalized}};
  PivotalFamily family = PivotalFamily::normal;
  int dim = 0;
  double alpha = 0.1;
  int repetitions = 10;
  std::size_t n_cal = 1000;
  std::size_t n_test = 1000;
  int n_bins = 3;
  std::uint64_t seed = 0;
};

struct SweepRow {
  GeneratorType type;
  std::string column;
  ExperimentCell cell;
};

std::vector<SweepRow> run_sweep(const SweepOptions& opt);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct PairDiagnostic {
  std::string measure;
  BootstrapQuantileReport bootstrap;
  KsResult ks;
  bool ks_rejects = false;
};

struct DiagnosisOptions {
  double alpha = 0.1;
  std::size_t B = 2000;
  double beta = 0.025;
  double ks_level = 0.01;
  std::uint64_t seed = 0;
};

/// Bootstrap and KS verdicts for every pair of classes present in `classes`.
std::vector<PairDiagnostic> diagnose_scores(const std::string& measure, std::span<const double> scores,
                                            std::span<const int> classes, const DiagnosisOptions& opt);

}  // namespace hetcp::cli
