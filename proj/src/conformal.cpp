#include "hetcp/conformal.hpp"

namespace hetcp {

namespace {

void check_inputs(const Measure& measure, const std::shared_ptr<const Estimator>& estimator, double alpha) {
  measure.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
  if (measure.kind == MeasureKind::standardized) throw config_error("diagnostic-only measure");
  if (!estimator || !estimator->ready()) throw config_error("calibration needs a ready estimator");
}

}  // namespace

double critical_score(std::span<const double> scores, double alpha) {
  return finite_quantile(scores, inflated_level(alpha, scores.size()));
}

std::vector<double> calibration_scores(const Measure& measure, const Estimator& estimator, const Dataset& calib,
                                       double alpha) {
  std::vector<double> scores(static_cast<std::size_t>(calib.size()));
  for (Eigen::Index i = 0; i < calib.size(); ++i) {
    const auto x = calib.x(i);
    scores[static_cast<std::size_t>(i)] =
        score(measure, prediction_for(measure, estimator.predict(x), alpha), calib.y(i));
  }
  return scores;
}

CalibratedPredictor calibrate(const Measure& measure, std::shared_ptr<const Estimator> estimator,
                              const Dataset& calib, double alpha) {
  check_inputs(measure, estimator, alpha);
  if (calib.empty()) throw data_error("empty calibration");
  const auto scores = calibration_scores(measure, *estimator, calib, alpha);
  CalibratedPredictor p;
  p.measure = measure;
  p.estimator = std::move(estimator);
  p.alpha = alpha;
  p.critical = critical_score(scores, alpha);
  p.calib_sizes[0] = scores.size();
  return p;
}

CalibratedPredictor calibrate_mondrian(const Measure& measure, std::shared_ptr<const Estimator> estimator,
                                       const Dataset& calib, double alpha, const Taxonomy& taxonomy) {
  check_inputs(measure, estimator, alpha);
  const auto scores = calibration_scores(measure, *estimator, calib, alpha);
  const auto classes = classify_all(taxonomy, calib);

  std::vector<std::vector<double>> by_class(static_cast<std::size_t>(taxonomy.n_classes()));
  for (std::size_t i = 0; i < scores.size(); ++i) by_class[static_cast<std::size_t>(classes[i])].push_back(scores[i]);

  CalibratedPredictor p;
  p.measure = measure;
  p.estimator = std::move(estimator);
  p.alpha = alpha;
  p.taxonomy = taxonomy;
  ClassCritical crit;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const int id = static_cast<int>(c);
    crit[id] = by_class[c].empty() ? kInf : critical_score(by_class[c], alpha);
    p.calib_sizes[id] = by_class[c].size();
  }
  p.critical = std::move(crit);
  return p;
}

double CalibratedPredictor::critical_for(int cls) const {
  if (const auto* global = std::get_if<double>(&critical)) return *global;
  const auto& map = std::get<ClassCritical>(critical);
  const auto it = map.find(cls);
  return it == map.end() ? kInf : it->second;
}

Interval CalibratedPredictor::predict(FeatureRef x) const {
  if (!estimator) throw config_error("predictor has no estimator");
  const double a_star = is_mondrian() ? critical_for(taxonomy.value().classify(x)) : std::get<double>(critical);
  return invert(measure, prediction_for(measure, estimator->predict(x), alpha), a_star);
}

}  // namespace hetcp
