#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetcp/conformal.hpp"
#include "hetcp/core.hpp"
#include "hetcp/taxonomy.hpp"

namespace hetcp {

/// Coverage and width of one taxonomy cell. An empty cell has no coverage or
/// width (missing, not zero).
struct ClassCell {
  std::size_t count = 0;
  std::size_t n_infinite = 0;
  std::optional<double> coverage;
  std::optional<double> width;
};

struct EvalReport {
  double alpha = 0.1;
  std::size_t n_test = 0;
  double marginal_coverage = 0.0;
  double marginal_width = 0.0;  // +inf when any interval is unbounded
  std::size_t n_infinite = 0;
  std::map<int, ClassCell> per_class;
};

/// Scores intervals against responses. `classes` may be empty (no per-class
/// breakdown); otherwise ids must lie in [0, n_classes).
EvalReport evaluate_intervals(std::span<const Interval> intervals, std::span<const double> y,
                              std::span<const int> classes, int n_classes, double alpha);

/// Classifies the test set with `t` (normally the calibration taxonomy).
EvalReport evaluate(const CalibratedPredictor& p, const Dataset& test, const Taxonomy& t);

struct MetricSummary {
  std::string group;   // "marginal" or the class id
  std::string metric;  // coverage | width
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  std::size_t n = 0;  // reports that carried a value
};

/// Mean and sample std per (group, metric) over reports with matching classes.
std::vector<MetricSummary> aggregate(std::span<const EvalReport> reports);

void write_summary_csv(std::ostream& out, std::span<const MetricSummary> rows);

}  // namespace hetcp
