#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hetcp {

struct EcdfPoint {
  double value = 0.0;
  double cum_prob = 0.0;
};

struct EcdfGroup {
  std::string name;  // "marginal" or the class id
  std::vector<EcdfPoint> points;
};

/// Marginal curve first, then one per class in ascending id order.
struct EcdfTable {
  std::vector<EcdfGroup> groups;
};

/// Empirical CDF with one step per distinct value.
std::vector<EcdfPoint> ecdf(std::span<const double> sample);

EcdfTable ecdf_by_class(std::span<const double> scores, std::span<const int> classes);

void write_ecdf_csv(std::ostream& out, const EcdfTable& table);

/// w_i = I_{i/n}(a, b) - I_{(i-1)/n}(a, b) with a = (n+1) q, b = (n+1)(1-q).
std::vector<double> harrell_davis_weights(std::size_t n, double q);

double harrell_davis(std::span<const double> sample, double q);

/// Level used by the bootstrap: the inflated (1-alpha)(1+1/n), capped below 1.
double bootstrap_level(double alpha, std::size_t n);

struct BootstrapQuantileReport {
  int class1 = 0;
  int class2 = 1;
  std::size_t B = 2000;
  double beta = 0.025;
  double alpha = 0.1;
  double lower = 0.0;
  double upper = 0.0;
  bool rejects = false;  // 0 lies outside [lower, upper]
};

/// Percentile bootstrap CI of HD(s1) - HD(s2) at the inflated level. Each
/// sample is resampled independently; replicate i draws from substreams
/// 2i (s1) and 2i+1 (s2) of `seed`.
BootstrapQuantileReport bootstrap_quantile_diff(std::span<const double> s1, std::span<const double> s2, double alpha,
                                                double beta, std::size_t B, std::uint64_t seed);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample KS with the asymptotic Kolmogorov p-value (Stephens' small-sample
/// correction on the effective size n1 n2/(n1+n2)). Approximate below ~30.
KsResult ks_two_sample(std::span<const double> s1, std::span<const double> s2);

inline const char* verdict(bool rejects) { return rejects ? "reject" : "no-evidence"; }

}  // namespace hetcp
