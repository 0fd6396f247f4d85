#pragma once

#include <json.hpp>

#include "hetcp/conformal.hpp"
#include "hetcp/diagnostics.hpp"
#include "hetcp/estimators.hpp"
#include "hetcp/metrics.hpp"
#include "hetcp/nonconformity.hpp"
#include "hetcp/taxonomy.hpp"

namespace hetcp {

using json = nlohmann::json;

/// Non-finite doubles travel as the strings "inf", "-inf", "nan".
json number_to_json(double v);
double number_from_json(const json& j);

json to_json(const MisspecOp& op);
MisspecOp misspec_from_json(const json& j);

/// {"kind":"oracle","wrappers":[{"op":"sigma_shift","lambda":0.1}]}
json to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_spec_from_json(const json& j);

json to_json(const Measure& m);
Measure measure_from_json(const json& j);

/// {"kind":"difficulty_bins","n_bins":3} or {"kind":"feature_threshold","dim":1,"xi":0.2}
json to_json(const TaxonomyConfig& cfg);
TaxonomyConfig taxonomy_config_from_json(const json& j);

/// Fitted estimator state: spec, oracle generator, k-NN training rows.
json to_json(const Estimator& est);
std::shared_ptr<const Estimator> estimator_from_json(const json& j);

/// Fitted taxonomy; a difficulty taxonomy reuses `estimator`.
json to_json(const Taxonomy& t);
Taxonomy taxonomy_from_json(const json& j, std::shared_ptr<const Estimator> estimator);

/// Everything predict needs, without the calibration data.
json to_json(const CalibratedPredictor& p);
CalibratedPredictor predictor_from_json(const json& j);

json to_json(const EvalReport& r);
json to_json(std::span<const MetricSummary> rows);
json to_json(const BootstrapQuantileReport& r);
json to_json(const KsResult& r);

}  // namespace hetcp
