#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetcp/core.hpp"
#include "hetcp/synthetic.hpp"

namespace hetcp {

struct MeanVarEstimate {
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
};

struct IntervalEstimate {
  double y_minus = 0.0;
  double y_plus = 0.0;
};

enum class MisspecKind { sigma_shift, sigma_scale, mu_shift_const, mu_shift_prop, quadratic_sigma };

/// `param` is lambda for the shift ops and the factor for sigma_scale.
/// `unit` only matters for quadratic_sigma, which maps
///   sigma^2 -> unit * (5 (sigma^2/unit - 0.5)^2 + 0.5);
/// unit = 1 is the plain form.
struct MisspecOp {
  MisspecKind kind = MisspecKind::sigma_scale;
  double param = 1.0;
  double unit = 1.0;

  void validate() const;
};

enum class EstimatorKind { oracle, knn, constant };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::oracle;
  int k = 50;
  double mu = 0.0;     // constant only
  double sigma = 1.0;  // constant only
  std::vector<MisspecOp> wrappers;
  std::uint64_t seed = 0;  // keys the misspecification noise

  void validate() const;
};

MeanVarEstimate apply_misspec(const MisspecOp& op, MeanVarEstimate est, RngStream& rng);

/// [mu - z sigma, mu + z sigma] with z the (1 - alpha/2) normal quantile.
IntervalEstimate mv_interval(const MeanVarEstimate& est, double alpha);

/// Bit-level hash of a feature vector. Misspecification noise is keyed on it so
/// that sigma_hat(x) is a function of x alone.
std::uint64_t feature_hash(FeatureRef x) noexcept;

/// Mean/variance predictor. Configure with attach_generator (oracle) or fit
/// (knn), then share as const; predict is thread-safe.
class Estimator {
 public:
  explicit Estimator(EstimatorSpec spec);

  void attach_generator(GeneratorType type);
  void fit(const Dataset& train);

  bool ready() const noexcept;
  const EstimatorSpec& spec() const noexcept { return spec_; }
  std::optional<GeneratorType> generator() const noexcept { return generator_; }
  const Dataset& training_data() const noexcept { return train_; }
  int effective_k() const noexcept;

  /// Estimate before any wrapper is applied.
  MeanVarEstimate predict_base(FeatureRef x) const;
  MeanVarEstimate predict(FeatureRef x) const;

 private:
  MeanVarEstimate predict_knn(FeatureRef x) const;

  EstimatorSpec spec_;
  std::optional<GeneratorType> generator_;
  Dataset train_;
  FeatureMatrix scaled_;
  Eigen::RowVectorXd center_;
  Eigen::RowVectorXd scale_;
  bool fitted_ = false;
};

std::string to_string(MisspecKind kind);
std::string to_string(EstimatorKind kind);
MisspecKind parse_misspec_kind(std::string_view name);
EstimatorKind parse_estimator_kind(std::string_view name);

}  // namespace hetcp
