#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetcp/core.hpp"
#include "hetcp/estimators.hpp"

namespace hetcp {

/// Cells (-inf, e1), [e1, e2), ..., [e_{k-1}, inf) over strictly ascending edges.
struct BinEdges {
  std::vector<double> edges;

  int n_bins() const noexcept { return static_cast<int>(edges.size()) + 1; }
  int locate(double value) const noexcept;
  void validate() const;
};

/// Edges at the j/n_bins empirical quantiles of `values`. Where n j / n_bins is
/// a whole number the edge sits halfway between the adjacent order statistics,
/// so distinct values split into populations that differ by at most one.
BinEdges fit_equal_frequency_bins(std::span<const double> values, int n_bins);

enum class TaxonomyKind { single, feature_threshold, difficulty_bins };

class Taxonomy {
 public:
  Taxonomy() = default;

  static Taxonomy single();
  /// Class 1 when x[dim] lies in [0, xi], class 0 otherwise.
  static Taxonomy feature_threshold(int dim, double xi);
  /// Bins the difficulty sigma_hat(x) of `estimator`.
  static Taxonomy difficulty_bins(std::shared_ptr<const Estimator> estimator, BinEdges edges);

  TaxonomyKind kind() const noexcept { return kind_; }
  int n_classes() const noexcept;
  int classify(FeatureRef x) const;
  double difficulty(FeatureRef x) const;

  int dim() const noexcept { return dim_; }
  double xi() const noexcept { return xi_; }
  const BinEdges& edges() const noexcept { return edges_; }
  const std::shared_ptr<const Estimator>& estimator() const noexcept { return estimator_; }

 private:
  TaxonomyKind kind_ = TaxonomyKind::single;
  int dim_ = 0;
  double xi_ = 0.0;
  BinEdges edges_;
  std::shared_ptr<const Estimator> estimator_;
};

std::vector<std::size_t> class_histogram(const Taxonomy& t, const Dataset& d);
std::vector<int> classify_all(const Taxonomy& t, const Dataset& d);

/// Unfitted taxonomy description, as found in run configs.
struct TaxonomyConfig {
  TaxonomyKind kind = TaxonomyKind::difficulty_bins;
  int n_bins = 3;
  int dim = 1;
  double xi = 0.2;

  void validate() const;
};

/// Builds the taxonomy; difficulty edges are fitted on sigma_hat over `fit_data`.
Taxonomy build_taxonomy(const TaxonomyConfig& cfg, std::shared_ptr<const Estimator> estimator,
                        const Dataset& fit_data);

std::string to_string(TaxonomyKind kind);
TaxonomyKind parse_taxonomy_kind(std::string_view name);

}  // namespace hetcp
