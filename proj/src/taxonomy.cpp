#include "hetcp/taxonomy.hpp"

#include <algorithm>
#include <cmath>

namespace hetcp {

int BinEdges::locate(double value) const noexcept {
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin());
}

void BinEdges::validate() const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw config_error("bin edges must be finite");
    if (i > 0 && !(edges[i - 1] < edges[i])) throw config_error("bin edges must be strictly ascending");
  }
}

BinEdges fit_equal_frequency_bins(std::span<const double> values, int n_bins) {
  if (n_bins < 1) throw config_error("n_bins must be at least 1");
  if (values.size() < static_cast<std::size_t>(n_bins)) throw data_error("degenerate binning: fewer values than bins");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw data_error("binning: non-finite difficulty value");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  BinEdges out;
  for (int j = 1; j < n_bins; ++j) {
    const double h = n * j / n_bins;
    const double r = std::round(h);
    double edge;
    if (std::abs(h - r) <= 1e-9 * std::max(1.0, r)) {
      const auto k = static_cast<std::size_t>(r);  // 1 <= k < n
      edge = 0.5 * (sorted[k - 1] + sorted[k]);
    } else {
      edge = sorted[static_cast<std::size_t>(std::ceil(h)) - 1];
    }
    if (!out.edges.empty() && !(out.edges.back() < edge)) {
      throw data_error("degenerate binning: duplicated quantiles, fewer distinct values than bins");
    }
    out.edges.push_back(edge);
  }
  return out;
}

Taxonomy Taxonomy::single() { return Taxonomy(); }

Taxonomy Taxonomy::feature_threshold(int dim, double xi) {
  if (dim < 0) throw config_error("feature_threshold: dim must be non-negative");
  if (!std::isfinite(xi)) throw config_error("feature_threshold: xi must be finite");
  Taxonomy t;
  t.kind_ = TaxonomyKind::feature_threshold;
  t.dim_ = dim;
  t.xi_ = xi;
  return t;
}

Taxonomy Taxonomy::difficulty_bins(std::shared_ptr<const Estimator> estimator, BinEdges edges) {
  if (!estimator) throw config_error("difficulty_bins needs an estimator");
  edges.validate();
  Taxonomy t;
  t.kind_ = TaxonomyKind::difficulty_bins;
  t.edges_ = std::move(edges);
  t.estimator_ = std::move(estimator);
  return t;
}

int Taxonomy::n_classes() const noexcept {
  switch (kind_) {
    case TaxonomyKind::single: return 1;
    case TaxonomyKind::feature_threshold: return 2;
    case TaxonomyKind::difficulty_bins: return edges_.n_bins();
  }
  return 1;
}

double Taxonomy::difficulty(FeatureRef x) const {
  if (!estimator_) throw config_error("taxonomy has no difficulty estimator");
  return estimator_->predict(x).sigma_hat;
}

int Taxonomy::classify(FeatureRef x) const {
  switch (kind_) {
    case TaxonomyKind::single:
      return 0;
    case TaxonomyKind::feature_threshold: {
      if (dim_ >= x.size()) throw data_error("feature_threshold: dim out of range for the feature vector");
      const double v = x(dim_);
      return v >= 0.0 && v <= xi_ ? 1 : 0;
    }
    case TaxonomyKind::difficulty_bins:
      return edges_.locate(difficulty(x));
  }
  return 0;
}

std::vector<int> classify_all(const Taxonomy& t, const Dataset& d) {
  std::vector<int> out(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) out[static_cast<std::size_t>(i)] = t.classify(d.x(i));
  return out;
}

std::vector<std::size_t> class_histogram(const Taxonomy& t, const Dataset& d) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(t.n_classes()), 0);
  for (int c : classify_all(t, d)) ++counts[static_cast<std::size_t>(c)];
  return counts;
}

void TaxonomyConfig::validate() const {
  if (kind == TaxonomyKind::difficulty_bins && n_bins < 1) throw config_error("taxonomy: n_bins must be >= 1");
  if (kind == TaxonomyKind::feature_threshold && (dim < 0 || !std::isfinite(xi))) {
    throw config_error("taxonomy: feature_threshold needs dim >= 0 and finite xi");
  }
}

Taxonomy build_taxonomy(const TaxonomyConfig& cfg, std::shared_ptr<const Estimator> estimator,
                        const Dataset& fit_data) {
  cfg.validate();
  switch (cfg.kind) {
    case TaxonomyKind::single:
      return Taxonomy::single();
    case TaxonomyKind::feature_threshold:
      return Taxonomy::feature_threshold(cfg.dim, cfg.xi);
    case TaxonomyKind::difficulty_bins: {
      if (!estimator) throw config_error("difficulty_bins needs an estimator");
      std::vector<double> delta(static_cast<std::size_t>(fit_data.size()));
      for (Eigen::Index i = 0; i < fit_data.size(); ++i) {
        delta[static_cast<std::size_t>(i)] = estimator->predict(fit_data.x(i)).sigma_hat;
      }
      BinEdges edges = fit_equal_frequency_bins(delta, cfg.n_bins);
      return Taxonomy::difficulty_bins(std::move(estimator), std::move(edges));
    }
  }
  throw std::logic_error("unknown taxonomy kind");
}

std::string to_string(TaxonomyKind kind) {
  switch (kind) {
    case TaxonomyKind::single: return "single";
    case TaxonomyKind::feature_threshold: return "feature_threshold";
    case TaxonomyKind::difficulty_bins: return "difficulty_bins";
  }
  return "?";
}

TaxonomyKind parse_taxonomy_kind(std::string_view name) {
  if (name == "single" || name == "none") return TaxonomyKind::single;
  if (name == "feature_threshold") return TaxonomyKind::feature_threshold;
  if (name == "difficulty_bins") return TaxonomyKind::difficulty_bins;
  throw config_error("unknown taxonomy kind '" + std::string(name) + "'");
}

}  // namespace hetcp
