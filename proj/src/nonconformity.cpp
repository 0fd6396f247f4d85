#include "hetcp/nonconformity.hpp"

#include <algorithm>
#include <cmath>

#include "hetcp/special.hpp"

namespace hetcp {

namespace {

const MeanVarEstimate& mean_var(const Measure& m, const Prediction& pred) {
  const auto* est = std::get_if<MeanVarEstimate>(&pred);
  if (!est) throw config_error("measure '" + to_string(m.kind) + "' needs a mean/std prediction");
  return *est;
}

const IntervalEstimate& bounds(const Prediction& pred) {
  const auto* iv = std::get_if<IntervalEstimate>(&pred);
  if (!iv) throw config_error("measure 'int' needs an interval prediction");
  return *iv;
}

double difficulty(const Measure& m, const MeanVarEstimate& est) {
  const double d = est.sigma_hat + m.epsilon;
  if (!(d != 0.0)) throw data_error("degenerate difficulty");
  return d;
}

}  // namespace

void Measure::validate() const {
  if (!std::isfinite(epsilon) || epsilon < 0.0) throw config_error("measure epsilon must be finite and >= 0");
}

Prediction prediction_for(const Measure& m, const MeanVarEstimate& est, double alpha) {
  if (m.kind == MeasureKind::interval) return mv_interval(est, alpha);
  return est;
}

double score(const Measure& m, const Prediction& pred, double y) {
  switch (m.kind) {
    case MeasureKind::residual:
      return std::abs(mean_var(m, pred).mu_hat - y);
    case MeasureKind::interval: {
      const auto& iv = bounds(pred);
      return std::max(y - iv.y_plus, iv.y_minus - y);
    }
    case MeasureKind::normalized: {
      const auto& est = mean_var(m, pred);
      return std::abs(est.mu_hat - y) / difficulty(m, est);
    }
    case MeasureKind::standardized: {
      const auto& est = mean_var(m, pred);
      return (y - est.mu_hat) / difficulty(m, est);
    }
  }
  throw std::logic_error("unknown measure kind");
}

Interval invert(const Measure& m, const Prediction& pred, double a_star) {
  if (m.kind == MeasureKind::standardized) throw config_error("diagnostic-only measure");
  if (std::isnan(a_star)) throw data_error("critical score is NaN");
  if (a_star == kInf) {
    // Still validate the prediction type.
    if (m.kind == MeasureKind::interval) bounds(pred); else mean_var(m, pred);
    return Interval::everything();
  }
  double lo = 0.0;
  double hi = 0.0;
  switch (m.kind) {
    case MeasureKind::residual: {
      const auto& est = mean_var(m, pred);
      lo = est.mu_hat - a_star;
      hi = est.mu_hat + a_star;
      break;
    }
    case MeasureKind::interval: {
      const auto& iv = bounds(pred);
      lo = iv.y_minus - a_star;
      hi = iv.y_plus + a_star;
      break;
    }
    case MeasureKind::normalized: {
      const auto& est = mean_var(m, pred);
      const double half = a_star * difficulty(m, est);
      lo = est.mu_hat - half;
      hi = est.mu_hat + half;
      break;
    }
    default:
      break;
  }
  if (lo > hi) return Interval::empty();
  return {lo, hi};
}

IdentitySides interval_identity_check(const MeanVarEstimate& est, double alpha, double y) {
  const IntervalEstimate iv = mv_interval(est, alpha);
  const double z_sigma = normal_quantile(1.0 - alpha / 2.0) * est.sigma_hat;
  return {std::max(iv.y_minus - y, y - iv.y_plus), std::abs(est.mu_hat - y) - z_sigma};
}

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::residual: return "res";
    case MeasureKind::interval: return "int";
    case MeasureKind::normalized: return "norm";
    case MeasureKind::standardized: return "std";
  }
  return "?";
}

MeasureKind parse_measure_kind(std::string_view name) {
  if (name == "res" || name == "residual") return MeasureKind::residual;
  if (name == "int" || name == "interval") return MeasureKind::interval;
  if (name == "norm" || name == "normalized") return MeasureKind::normalized;
  if (name == "std" || name == "standardized") return MeasureKind::standardized;
  throw config_error("unknown measure '" + std::string(name) + "' (expected res, int, norm or std)");
}

}  // namespace hetcp
