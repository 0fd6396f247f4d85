#include "hetcp/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace hetcp {

int default_dim(GeneratorType type) {
  switch (type) {
    case GeneratorType::toy_cv:
      return 15;
    default:
      return 2;
  }
}

int GeneratorSpec::resolved_dim() const { return dim > 0 ? dim : default_dim(type); }

void GeneratorSpec::validate() const {
  if (dim < 0) throw config_error("generator: dim must be positive");
  const int d = resolved_dim();
  if (n < 1) throw config_error("generator: n must be at least 1");
  switch (type) {
    case GeneratorType::type1_const_mean:
      if (d < 2) throw config_error("generator type1 needs dim >= 2 (sigma depends on x_2)");
      break;
    case GeneratorType::example21:
    case GeneratorType::fig1_demo:
      if (d != 2) throw config_error("generator " + to_string(type) + " is two-dimensional");
      break;
    case GeneratorType::type4_bimodal:
      if (family != PivotalFamily::normal) throw config_error("generator type4 mixes normal components only");
      break;
    default:
      break;
  }
}

TruthColumns GeneratedData::truth_columns() const {
  TruthColumns cols{Eigen::VectorXd(static_cast<Eigen::Index>(truths.size())),
                    Eigen::VectorXd(static_cast<Eigen::Index>(truths.size()))};
  for (std::size_t i = 0; i < truths.size(); ++i) {
    cols.mu(static_cast<Eigen::Index>(i)) = truths[i].mu;
    cols.sigma(static_cast<Eigen::Index>(i)) = truths[i].sigma;
  }
  return cols;
}

namespace {

// Left-to-right sum: Eigen's vectorized reductions depend on alignment, and the
// truth must not change by an ulp between a fresh vector and a dataset row.
double ordered_sum(FeatureRef x) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) s += x(j);
  return s;
}

double ordered_mean(FeatureRef x) { return ordered_sum(x) / static_cast<double>(x.size()); }

}  // namespace

OracleTruth oracle_truth(GeneratorType type, FeatureRef x) {
  switch (type) {
    case GeneratorType::type1_const_mean:
      return {0.0, 1.0 + std::abs(x(1) - 0.5)};
    case GeneratorType::type2_functional: {
      const double mu = 10.0 * ordered_mean(x);
      return {mu, 0.1 * std::abs(mu)};
    }
    case GeneratorType::type3_lowdim:
      return {ordered_sum(x), 1.0 + std::abs(x(0) - 0.5)};
    case GeneratorType::type4_bimodal: {
      const double mu = 4.0 * ordered_mean(x);
      return {mu, 0.1 * std::abs(mu)};
    }
    case GeneratorType::example21:
      return {x(0) + x(1), 1.0 + std::abs(x(1) - 0.5)};
    case GeneratorType::toy_cv: {
      const double mu = ordered_mean(x);
      if (!(mu > 0.0)) throw data_error("toy_cv: mean(x) must be positive so that sigma = 0.1 mu > 0");
      return {mu, 0.1 * mu};
    }
    case GeneratorType::fig1_demo: {
      const double s = x(1) >= 0.5 ? 1.0 : 0.0;
      return {0.1 * x(0) + 2.0 * s, s > 0.0 ? 0.5 : 0.1};
    }
  }
  throw std::logic_error("unknown generator type");
}

OracleTruth bimodal_component(double mu) {
  return {mu <= 2.0 ? mu - 1.0 : mu + 1.0, 0.1 * std::abs(mu)};
}

double triangular_raw(double lambda, double u) { return lambda * std::sqrt(u); }

double sample_pivot(PivotalFamily family, RngStream& rng) {
  switch (family) {
    case PivotalFamily::normal:
      return rng.normal();
    case PivotalFamily::laplace: {
      const double u = rng.uniform_open() - 0.5;
      const double b = 1.0 / std::numbers::sqrt2;
      return -b * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
    }
    case PivotalFamily::uniform:
      return (2.0 * rng.uniform() - 1.0) * std::numbers::sqrt3;
    case PivotalFamily::triangular: {
      // Raw width-1 draw standardized with mean 2/3 and sd 1/(3 sqrt 2).
      const double raw = triangular_raw(1.0, rng.uniform());
      return (raw - 2.0 / 3.0) * 3.0 * std::numbers::sqrt2;
    }
    case PivotalFamily::exponential:
      return -std::log(rng.uniform_open()) - 1.0;
  }
  throw std::logic_error("unknown pivotal family");
}

Observation draw_observation(const GeneratorSpec& spec, RngStream& rng, OracleTruth* truth) {
  const int d = spec.resolved_dim();
  Observation obs{Eigen::VectorXd(d), 0.0};
  switch (spec.type) {
    case GeneratorType::toy_cv:
      for (int j = 0; j < d; ++j) obs.x(j) = 100.0 * rng.uniform_open();
      break;
    case GeneratorType::fig1_demo:
      obs.x(0) = 10.0 * rng.uniform();
      obs.x(1) = rng.uniform() < 0.5 ? 0.0 : 1.0;
      break;
    default:
      for (int j = 0; j < d; ++j) obs.x(j) = rng.uniform();
      break;
  }
  const OracleTruth t = oracle_truth(spec.type, obs.x);
  if (spec.type == GeneratorType::type4_bimodal) {
    const OracleTruth component = bimodal_component(t.mu);
    obs.y = component.mu + component.sigma * rng.normal();
  } else {
    obs.y = t.mu + t.sigma * sample_pivot(spec.family, rng);
  }
  if (truth) *truth = t;
  return obs;
}

GeneratedData generate(const GeneratorSpec& spec) {
  spec.validate();
  const int d = spec.resolved_dim();
  const auto n = static_cast<Eigen::Index>(spec.n);
  FeatureMatrix x(n, d);
  Eigen::VectorXd y(n);
  std::vector<OracleTruth> truths(spec.n);
  RngStream rng(spec.seed, spec.stream);
  for (Eigen::Index i = 0; i < n; ++i) {
    Observation obs = draw_observation(spec, rng, &truths[static_cast<std::size_t>(i)]);
    x.row(i) = obs.x.transpose();
    y(i) = obs.y;
  }
  return {Dataset(std::move(x), std::move(y)), std::move(truths)};
}

namespace {

template <typename Draw>
Moments sample_moments(std::size_t n, Draw&& draw) {
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double v = draw();
    const double delta = v - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (v - mean);
  }
  return {mean, n > 1 ? m2 / static_cast<double>(n - 1) : 0.0};
}

}  // namespace

Moments moments_check(PivotalFamily family, double mu, double sigma, std::size_t n, RngStream& rng) {
  return sample_moments(n, [&] { return mu + sigma * sample_pivot(family, rng); });
}

Moments moments_check(double lambda, std::size_t n, RngStream& rng) {
  return sample_moments(n, [&] { return triangular_raw(lambda, rng.uniform()); });
}

std::string to_string(PivotalFamily family) {
  switch (family) {
    case PivotalFamily::normal: return "normal";
    case PivotalFamily::laplace: return "laplace";
    case PivotalFamily::uniform: return "uniform";
    case PivotalFamily::triangular: return "triangular";
    case PivotalFamily::exponential: return "exponential";
  }
  return "?";
}

std::string to_string(GeneratorType type) {
  switch (type) {
    case GeneratorType::type1_const_mean: return "type1";
    case GeneratorType::type2_functional: return "type2";
    case GeneratorType::type3_lowdim: return "type3";
    case GeneratorType::type4_bimodal: return "type4";
    case GeneratorType::example21: return "example21";
    case GeneratorType::toy_cv: return "toy_cv";
    case GeneratorType::fig1_demo: return "fig1_demo";
  }
  return "?";
}

PivotalFamily parse_family(std::string_view name) {
  for (auto f : {PivotalFamily::normal, PivotalFamily::laplace, PivotalFamily::uniform, PivotalFamily::triangular,
                 PivotalFamily::exponential}) {
    if (name == to_string(f)) return f;
  }
  throw config_error("unknown family '" + std::string(name) + "'");
}

GeneratorType parse_generator_type(std::string_view name) {
  if (name == "type1" || name == "type1_const_mean") return GeneratorType::type1_const_mean;
  if (name == "type2" || name == "type2_functional") return GeneratorType::type2_functional;
  if (name == "type3" || name == "type3_lowdim") return GeneratorType::type3_lowdim;
  if (name == "type4" || name == "type4_bimodal") return GeneratorType::type4_bimodal;
  if (name == "example21") return GeneratorType::example21;
  if (name == "toy_cv") return GeneratorType::toy_cv;
  if (name == "fig1_demo" || name == "fig1") return GeneratorType::fig1_demo;
  throw config_error("unknown generator type '" + std::string(name) + "'");
}

}  // namespace hetcp
