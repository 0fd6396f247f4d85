#include "hetcp/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "hetcp/special.hpp"

namespace hetcp {

void MisspecOp::validate() const {
  if (!std::isfinite(param) || !std::isfinite(unit)) throw config_error("misspecification parameters must be finite");
  switch (kind) {
    case MisspecKind::sigma_scale:
      if (!(param > 0.0)) throw config_error("sigma_scale factor must be positive");
      break;
    case MisspecKind::quadratic_sigma:
      if (!(unit > 0.0)) throw config_error("quadratic_sigma unit must be positive");
      break;
    default:
      if (param < 0.0) throw config_error(to_string(kind) + " lambda must be non-negative");
      break;
  }
}

void EstimatorSpec::validate() const {
  if (kind == EstimatorKind::knn && k < 1) throw config_error("knn: k must be at least 1");
  if (kind == EstimatorKind::constant && (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0)) {
    throw config_error("constant estimator needs finite mu and sigma >= 0");
  }
  for (const auto& op : wrappers) op.validate();
}

MeanVarEstimate apply_misspec(const MisspecOp& op, MeanVarEstimate est, RngStream& rng) {
  switch (op.kind) {
    case MisspecKind::sigma_shift:
      est.sigma_hat = std::max(est.sigma_hat + op.param * rng.normal(), 0.0);
      break;
    case MisspecKind::sigma_scale:
      est.sigma_hat *= op.param;
      break;
    case MisspecKind::mu_shift_const:
      est.mu_hat += op.param * rng.normal();
      break;
    case MisspecKind::mu_shift_prop:
      est.mu_hat += op.param * est.sigma_hat * rng.normal();
      break;
    case MisspecKind::quadratic_sigma: {
      const double s = est.sigma_hat * est.sigma_hat / op.unit - 0.5;
      est.sigma_hat = std::sqrt(op.unit * (5.0 * s * s + 0.5));
      break;
    }
  }
  return est;
}

IntervalEstimate mv_interval(const MeanVarEstimate& est, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
  const double half = normal_quantile(1.0 - alpha / 2.0) * est.sigma_hat;
  return {est.mu_hat - half, est.mu_hat + half};
}

std::uint64_t feature_hash(FeatureRef x) noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x(i) == 0.0 ? 0.0 : x(i);  // fold -0 into +0
    h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

Estimator::Estimator(EstimatorSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

void Estimator::attach_generator(GeneratorType type) { generator_ = type; }

void Estimator::fit(const Dataset& train) {
  if (spec_.kind != EstimatorKind::knn) {
    fitted_ = true;
    return;
  }
  if (train.empty()) throw data_error("knn: empty training set");
  train_ = train;
  const auto& f = train.features();
  center_ = f.colwise().mean();
  scale_.resize(f.cols());
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    const double sd = f.rows() > 1 ? std::sqrt((f.col(c).array() - center_(c)).square().sum() /
                                               static_cast<double>(f.rows() - 1))
                                   : 0.0;
    scale_(c) = sd > 0.0 ? sd : 1.0;  // constant columns carry no distance
  }
  scaled_ = (f.rowwise() - center_).array().rowwise() / scale_.array();
  fitted_ = true;
}

bool Estimator::ready() const noexcept {
  switch (spec_.kind) {
    case EstimatorKind::oracle:
      return generator_.has_value();
    case EstimatorKind::knn:
      return fitted_;
    case EstimatorKind::constant:
      return true;
  }
  return false;
}

int Estimator::effective_k() const noexcept {
  if (spec_.kind != EstimatorKind::knn || !fitted_) return spec_.k;
  return static_cast<int>(std::min<Eigen::Index>(spec_.k, train_.size()));
}

MeanVarEstimate Estimator::predict_knn(FeatureRef x) const {
  if (x.size() != scaled_.cols()) throw data_error("knn: feature dimension mismatch");
  const Eigen::RowVectorXd q = (x.transpose() - center_).array() / scale_.array();
  const Eigen::VectorXd d2 = (scaled_.rowwise() - q).rowwise().squaredNorm();

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d2.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto k = static_cast<std::size_t>(effective_k());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return d2(a) < d2(b) || (d2(a) == d2(b) && a < b); });

  // Sorting the neighbour responses makes the sums independent of row order.
  std::vector<double> ys(k);
  for (std::size_t i = 0; i < k; ++i) ys[i] = train_.y(idx[i]);
  std::sort(ys.begin(), ys.end());
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  const double sd = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0;
  return {mean, sd};
}

MeanVarEstimate Estimator::predict_base(FeatureRef x) const {
  switch (spec_.kind) {
    case EstimatorKind::oracle: {
      if (!generator_) throw config_error("oracle estimator has no generator attached");
      const OracleTruth t = oracle_truth(*generator_, x);
      return {t.mu, t.sigma};
    }
    case EstimatorKind::knn:
      if (!fitted_) throw config_error("knn estimator used before fit");
      return predict_knn(x);
    case EstimatorKind::constant:
      return {spec_.mu, spec_.sigma};
  }
  throw std::logic_error("unknown estimator kind");
}

MeanVarEstimate Estimator::predict(FeatureRef x) const {
  MeanVarEstimate est = predict_base(x);
  if (spec_.wrappers.empty()) return est;
  const std::uint64_t key = derive_seed(spec_.seed, feature_hash(x));
  for (std::size_t i = 0; i < spec_.wrappers.size(); ++i) {
    RngStream rng(key, i);
    est = apply_misspec(spec_.wrappers[i], est, rng);
  }
  return est;
}

std::string to_string(MisspecKind kind) {
  switch (kind) {
    case MisspecKind::sigma_shift: return "sigma_shift";
    case MisspecKind::sigma_scale: return "sigma_scale";
    case MisspecKind::mu_shift_const: return "mu_shift_const";
    case MisspecKind::mu_shift_prop: return "mu_shift_prop";
    case MisspecKind::quadratic_sigma: return "quadratic_sigma";
  }
  return "?";
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::oracle: return "oracle";
    case EstimatorKind::knn: return "knn";
    case EstimatorKind::constant: return "constant";
  }
  return "?";
}

MisspecKind parse_misspec_kind(std::string_view name) {
  for (auto k : {MisspecKind::sigma_shift, MisspecKind::sigma_scale, MisspecKind::mu_shift_const,
                 MisspecKind::mu_shift_prop, MisspecKind::quadratic_sigma}) {
    if (name == to_string(k)) return k;
  }
  if (name == "quadratic") return MisspecKind::quadratic_sigma;
  throw config_error("unknown misspecification op '" + std::string(name) + "'");
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (auto k : {EstimatorKind::oracle, EstimatorKind::knn, EstimatorKind::constant}) {
    if (name == to_string(k)) return k;
  }
  throw config_error("unknown estimator kind '" + std::string(name) + "'");
}

}  // namespace hetcp
