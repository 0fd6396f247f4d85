#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hetcp/core.hpp"
#include "hetcp/estimators.hpp"
#include "hetcp/nonconformity.hpp"
#include "hetcp/taxonomy.hpp"

namespace hetcp {

/// Per-class critical scores of a Mondrian predictor.
using ClassCritical = std::map<int, double>;

/// Global form holds one a*; the Mondrian form holds one per taxonomy class and
/// requires the taxonomy. Immutable once calibrated.
struct CalibratedPredictor {
  Measure measure;
  std::shared_ptr<const Estimator> estimator;
  double alpha = 0.1;
  std::variant<double, ClassCritical> critical = kInf;
  std::optional<Taxonomy> taxonomy;
  std::map<int, std::size_t> calib_sizes;

  bool is_mondrian() const noexcept { return std::holds_alternative<ClassCritical>(critical); }
  double critical_for(int cls) const;
  Interval predict(FeatureRef x) const;
};

/// a* = the ceil((1-alpha)(1+1/n) n)-th smallest score.
double critical_score(std::span<const double> scores, double alpha);

std::vector<double> calibration_scores(const Measure& measure, const Estimator& estimator, const Dataset& calib,
                                       double alpha);

CalibratedPredictor calibrate(const Measure& measure, std::shared_ptr<const Estimator> estimator,
                              const Dataset& calib, double alpha);

/// Empty classes get a* = +inf and show up with size 0 in calib_sizes.
CalibratedPredictor calibrate_mondrian(const Measure& measure, std::shared_ptr<const Estimator> estimator,
                                       const Dataset& calib, double alpha, const Taxonomy& taxonomy);

}  // namespace hetcp
