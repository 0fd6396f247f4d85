#include "hetcp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "hetcp/core.hpp"
#include "hetcp/csv.hpp"
#include "hetcp/parallel.hpp"
#include "hetcp/rng.hpp"
#include "hetcp/special.hpp"

namespace hetcp {

std::vector<EcdfPoint> ecdf(std::span<const double> sample) {
  if (sample.empty()) throw data_error("ecdf: empty group");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<EcdfPoint> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

EcdfTable ecdf_by_class(std::span<const double> scores, std::span<const int> classes) {
  if (scores.size() != classes.size()) throw data_error("ecdf: score/class count mismatch");
  std::map<int, std::vector<double>> groups;
  for (std::size_t i = 0; i < scores.size(); ++i) groups[classes[i]].push_back(scores[i]);
  EcdfTable table;
  table.groups.push_back({"marginal", ecdf(scores)});
  for (const auto& [c, values] : groups) table.groups.push_back({std::to_string(c), ecdf(values)});
  return table;
}

void write_ecdf_csv(std::ostream& out, const EcdfTable& table) {
  out << "group,value,cum_prob\n";
  for (const auto& g : table.groups) {
    for (const auto& p : g.points) out << g.name << ',' << format_double(p.value) << ',' << format_double(p.cum_prob) << '\n';
  }
}

std::vector<double> harrell_davis_weights(std::size_t n, double q) {
  if (!(q > 0.0 && q < 1.0)) throw config_error("harrell_davis: q must lie in (0, 1)");
  if (n == 0) throw data_error("harrell_davis: empty sample");
  const double a = (static_cast<double>(n) + 1.0) * q;
  const double b = (static_cast<double>(n) + 1.0) * (1.0 - q);
  std::vector<double> w(n);
  double prev = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double cur = i == n ? 1.0 : regularized_incomplete_beta(a, b, static_cast<double>(i) / static_cast<double>(n));
    w[i - 1] = cur - prev;
    prev = cur;
  }
  return w;
}

namespace {

double weighted_sum(std::span<const double> sorted, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) s += w[i] * sorted[i];
  return s;
}

// 1-based rank r*B snapped to an integer when floating error pushes it just off one.
double snapped(double r) {
  const double k = std::round(r);
  return std::abs(r - k) <= 1e-9 * std::max(1.0, k) ? k : r;
}

}  // namespace

double harrell_davis(std::span<const double> sample, double q) {
  const auto w = harrell_davis_weights(sample.size(), q);
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return weighted_sum(sorted, w);
}

double bootstrap_level(double alpha, std::size_t n) { return std::min(inflated_level(alpha, n), 1.0 - 1e-9); }

BootstrapQuantileReport bootstrap_quantile_diff(std::span<const double> s1, std::span<const double> s2, double alpha,
                                                double beta, std::size_t B, std::uint64_t seed) {
  if (s1.empty() || s2.empty()) throw data_error("bootstrap: empty sample");
  if (B < 100) throw config_error("bootstrap: B must be at least 100");
  if (!(beta > 0.0 && beta < 1.0)) throw config_error("bootstrap: beta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");

  // Weights depend only on (n, q), so they are shared by every replicate.
  const auto w1 = harrell_davis_weights(s1.size(), bootstrap_level(alpha, s1.size()));
  const auto w2 = harrell_davis_weights(s2.size(), bootstrap_level(alpha, s2.size()));

  auto resampled_hd = [](std::span<const double> s, std::span<const double> w, RngStream rng) {
    std::vector<double> r(s.size());
    for (auto& v : r) v = s[rng.below(s.size())];
    std::sort(r.begin(), r.end());
    return weighted_sum(r, w);
  };

  std::vector<double> d(B);
  parallel_for(B, [&](std::size_t i) {
    d[i] = resampled_hd(s1, w1, RngStream(seed, 2 * i)) - resampled_hd(s2, w2, RngStream(seed, 2 * i + 1));
  });
  std::sort(d.begin(), d.end());

  const double half = static_cast<double>(B) * beta / 2.0;
  const auto lo = static_cast<std::size_t>(std::clamp(std::ceil(snapped(half)), 1.0, static_cast<double>(B)));
  const auto hi =
      static_cast<std::size_t>(std::clamp(std::floor(snapped(static_cast<double>(B) - half)), 1.0, static_cast<double>(B)));

  BootstrapQuantileReport r;
  r.B = B;
  r.beta = beta;
  r.alpha = alpha;
  r.lower = d[lo - 1];
  r.upper = d[std::max(hi, lo) - 1];
  r.rejects = r.lower > 0.0 || r.upper < 0.0;
  return r;
}

KsResult ks_two_sample(std::span<const double> s1, std::span<const double> s2) {
  if (s1.empty() || s2.empty()) throw data_error("ks: empty sample");
  std::vector<double> a(s1.begin(), s1.end());
  std::vector<double> b(s2.begin(), s2.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto n1 = static_cast<double>(a.size());
  const auto n2 = static_cast<double>(b.size());

  // Step both ECDFs past every copy of the next distinct value before comparing.
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }

  const double ne = n1 * n2 / (n1 + n2);
  const double sq = std::sqrt(ne);
  return {d, d == 0.0 ? 1.0 : kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

}  // namespace hetcp
