#include "hetcp/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetcp/rng.hpp"

namespace hetcp {

Interval Interval::make(double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("interval requires lower <= upper");
  }
  return {lower, upper};
}

bool Interval::is_bounded() const noexcept {
  return std::isfinite(lower) && std::isfinite(upper);
}

double Interval::width() const noexcept {
  if (is_empty()) return 0.0;
  return upper - lower;
}

Dataset::Dataset(FeatureMatrix features, Eigen::VectorXd targets)
    : features_(std::move(features)), targets_(std::move(targets)) {
  if (features_.rows() != targets_.size()) {
    throw data_error("dataset: feature rows and targets differ in length");
  }
  if (!features_.allFinite() || !targets_.allFinite()) {
    throw data_error("dataset: non-finite value");
  }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  FeatureMatrix f(static_cast<Eigen::Index>(rows.size()), dim());
  Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto i = rows[k];
    if (i < 0 || i >= size()) throw std::out_of_range("dataset subset: row index out of range");
    f.row(static_cast<Eigen::Index>(k)) = features_.row(i);
    t(static_cast<Eigen::Index>(k)) = targets_(i);
  }
  return Dataset(std::move(f), std::move(t));
}

double finite_quantile(std::span<const double> scores, double beta) {
  if (scores.empty()) throw data_error("empty calibration");
  if (beta > 1.0) return kInf;
  const std::size_t n = scores.size();
  if (beta <= 0.0) return *std::min_element(scores.begin(), scores.end());

  // beta*n usually arrives as (1-alpha)(n+1) evaluated in floating point;
  // snap near-integers so a representation error cannot skip a whole rank.
  const double target = beta * static_cast<double>(n);
  const double nearest = std::round(target);
  double rank = std::ceil(target);
  if (std::abs(target - nearest) <= 1e-9 * std::max(1.0, nearest)) rank = nearest;
  const auto k = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n)));

  std::vector<double> sorted(scores.begin(), scores.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  return sorted[k - 1];
}

void SplitSpec::validate() const {
  const auto inside = [](double f) { return f > 0.0 && f < 1.0; };
  if (!inside(test_fraction) || !inside(calibration_fraction_of_train)) {
    throw config_error("split fractions must lie strictly inside (0, 1)");
  }
}

DataSplit split_dataset(const Dataset& data, const SplitSpec& spec) {
  spec.validate();
  const Eigen::Index n = data.size();
  if (n < 4) throw data_error("dataset too small to split (need at least 4 rows)");

  auto n_test = static_cast<Eigen::Index>(std::llround(static_cast<double>(n) * spec.test_fraction));
  n_test = std::clamp<Eigen::Index>(n_test, 1, n - 2);
  const Eigen::Index n_rest = n - n_test;
  auto n_cal = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(n_rest) * spec.calibration_fraction_of_train));
  n_cal = std::clamp<Eigen::Index>(n_cal, 1, n_rest - 1);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  RngStream rng(spec.seed, 0x5b117);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  DataSplit split;
  const auto n_train = static_cast<std::size_t>(n_rest - n_cal);
  split.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.calibration_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                                order.begin() + static_cast<std::ptrdiff_t>(n_rest));
  split.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_rest), order.end());
  split.train = data.subset(split.train_rows);
  split.calibration = data.subset(split.calibration_rows);
  split.test = data.subset(split.test_rows);
  return split;
}

}  // namespace hetcp
