#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "hetcp/core.hpp"
#include "hetcp/estimators.hpp"

namespace hetcp {

enum class MeasureKind { residual, interval, normalized, standardized };

/// epsilon stabilizes the normalized and standardized denominators sigma_hat + eps.
struct Measure {
  MeasureKind kind = MeasureKind::residual;
  double epsilon = 1e-8;

  void validate() const;
};

/// What a measure consumes: a mean/std pair, or interval bounds for `int`.
using Prediction = std::variant<MeanVarEstimate, IntervalEstimate>;

/// The prediction the measure expects, built from a mean/std estimate.
/// Interval measures use the normal interval at level alpha.
Prediction prediction_for(const Measure& m, const MeanVarEstimate& est, double alpha);

double score(const Measure& m, const Prediction& pred, double y);

/// {y : score(m, pred, y) <= a_star}. Interval scores can be negative, so the
/// result may be the empty interval.
Interval invert(const Measure& m, const Prediction& pred, double a_star);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// max(y_minus - y, y - y_plus) against |mu - y| - z sigma for the normal interval.
IdentitySides interval_identity_check(const MeanVarEstimate& est, double alpha, double y);

std::string to_string(MeasureKind kind);
MeasureKind parse_measure_kind(std::string_view name);

}  // namespace hetcp
