#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hetcp {

/// Failure category; the CLI maps it onto its exit code.
enum class ErrorKind { config, data };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return Error(ErrorKind::config, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FeatureRef = Eigen::Ref<const Eigen::VectorXd>;

struct Observation {
  Eigen::VectorXd x;
  double y = 0.0;
};

/// Closed interval with possibly infinite endpoints. The only admissible
/// state with lower > upper is the canonical empty set returned by empty().
struct Interval {
  double lower = -kInf;
  double upper = kInf;

  static Interval everything() { return {-kInf, kInf}; }
  static Interval empty() { return {kInf, -kInf}; }
  static Interval make(double lower, double upper);

  bool is_empty() const noexcept { return lower > upper; }
  bool is_bounded() const noexcept;
  bool contains(double y) const noexcept { return lower <= y && y <= upper; }
  double width() const noexcept;
};

/// Rows of `features` are observations. Every coordinate and target is finite.
class Dataset {
 public:
  Dataset() = default;
  Dataset(FeatureMatrix features, Eigen::VectorXd targets);

  Eigen::Index size() const noexcept { return targets_.size(); }
  Eigen::Index dim() const noexcept { return features_.cols(); }
  bool empty() const noexcept { return size() == 0; }

  const FeatureMatrix& features() const noexcept { return features_; }
  const Eigen::VectorXd& targets() const noexcept { return targets_; }

  auto x(Eigen::Index i) const { return features_.row(i).transpose(); }
  double y(Eigen::Index i) const { return targets_(i); }
  Observation observation(Eigen::Index i) const { return {features_.row(i).transpose(), targets_(i)}; }

  Dataset subset(std::span<const Eigen::Index> rows) const;

 private:
  FeatureMatrix features_;
  Eigen::VectorXd targets_;
};

/// Returns the ceil(beta*n)-th smallest score (1-based). beta <= 0 gives the
/// minimum and beta > 1 gives +inf. Throws on an empty score set.
double finite_quantile(std::span<const double> scores, double beta);

/// The inflated calibration level (1 - alpha)(1 + 1/n).
inline double inflated_level(double alpha, std::size_t n) {
  return (1.0 - alpha) * (1.0 + 1.0 / static_cast<double>(n));
}

struct SplitSpec {
  double test_fraction = 0.2;
  double calibration_fraction_of_train = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DataSplit {
  Dataset train;
  Dataset calibration;
  Dataset test;
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> calibration_rows;
  std::vector<Eigen::Index> test_rows;
};

DataSplit split_dataset(const Dataset& data, const SplitSpec& spec);

}  // namespace hetcp
