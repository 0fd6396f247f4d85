#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hetcp/core.hpp"
#include "hetcp/csv.hpp"
#include "hetcp/rng.hpp"

namespace hetcp {

/// Standardized pivots g with mean 0 and variance 1. y = mu + sigma * pivot
/// then has density (1/sigma) g((y - mu)/sigma).
enum class PivotalFamily { normal, laplace, uniform, triangular, exponential };

enum class GeneratorType {
  type1_const_mean,  // mu = 0, sigma = 1 + |x_2 - 0.5|
  type2_functional,  // mu = 10 mean(x), sigma = 0.1 |mu|
  type3_lowdim,      // mu = sum(x), sigma = 1 + |x_1 - 0.5|
  type4_bimodal,     // mu = 4 mean(x); y ~ N(mu -/+ 1, (0.1 mu)^2) split at mu = 2
  example21,         // mu = x_1 + x_2, sigma = 1 + |x_2 - 0.5| on [0,1]^2
  toy_cv,            // mu = mean(x), sigma = 0.1 mu, x ~ U(0,100)^dim
  fig1_demo,         // x = (t, s): mu = 0.1 t + 2 s, sigma = 0.1 or 0.5
};

/// Location and scale of P(Y | x). For type4 these are the generating
/// parameters mu(x), 0.1 mu(x), not the moments of the selected component.
struct OracleTruth {
  double mu = 0.0;
  double sigma = 1.0;
};

struct GeneratorSpec {
  GeneratorType type = GeneratorType::type2_functional;
  PivotalFamily family = PivotalFamily::normal;
  int dim = 0;  // 0 selects the type's default
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  int resolved_dim() const;
  void validate() const;
};

struct GeneratedData {
  Dataset data;
  std::vector<OracleTruth> truths;

  TruthColumns truth_columns() const;
};

int default_dim(GeneratorType type);

GeneratedData generate(const GeneratorSpec& spec);

/// One (x, y) draw from the generator, writing the truth at x if requested.
Observation draw_observation(const GeneratorSpec& spec, RngStream& rng, OracleTruth* truth = nullptr);

OracleTruth oracle_truth(GeneratorType type, FeatureRef x);

/// Mixture component chosen at location mu for the type4 generator.
OracleTruth bimodal_component(double mu);

double sample_pivot(PivotalFamily family, RngStream& rng);

/// Inverse CDF of the triangular density 2y/lambda^2 on [0, lambda].
double triangular_raw(double lambda, double u);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Monte Carlo mean and unbiased variance of mu + sigma * pivot.
Moments moments_check(PivotalFamily family, double mu, double sigma, std::size_t n, RngStream& rng);
/// Monte Carlo moments of raw triangular draws with width lambda.
Moments moments_check(double lambda, std::size_t n, RngStream& rng);

std::string to_string(PivotalFamily family);
std::string to_string(GeneratorType type);
PivotalFamily parse_family(std::string_view name);
GeneratorType parse_generator_type(std::string_view name);

}  // namespace hetcp
