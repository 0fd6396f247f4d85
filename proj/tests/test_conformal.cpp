#include <doctest.h>

#include <cmath>
#include <memory>

#include "hetcp/conformal.hpp"
#include "hetcp/metrics.hpp"

using namespace hetcp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::shared_ptr<const Estimator> constant(double mu, double sigma) {
  EstimatorSpec spec;
  spec.kind = EstimatorKind::constant;
  spec.mu = mu;
  spec.sigma = sigma;
  return std::make_shared<Estimator>(spec);
}

std::shared_ptr<const Estimator> oracle(GeneratorType type) {
  auto e = std::make_shared<Estimator>(EstimatorSpec{});
  e->attach_generator(type);
  return e;
}

Dataset responses(std::initializer_list<double> ys) {
  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(ys.size()), 1);
  return Dataset(x, vec(ys));
}

Dataset sample(GeneratorType type, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  GeneratorSpec g;
  g.type = type;
  g.n = n;
  g.seed = seed;
  g.stream = stream;
  return generate(g).data;
}

}  // namespace

TEST_CASE("critical score of nine residuals") {
  const auto p = calibrate(Measure{}, constant(0.0, 1.0), responses({1, 2, 3, 4, 5, 6, 7, 8, 9}), 0.2);
  CHECK(std::get<double>(p.critical) == 8.0);
  CHECK(p.calib_sizes.at(0) == 9);
  const Interval iv = p.predict(vec({0.0}));
  CHECK(iv.lower == -8.0);
  CHECK(iv.upper == 8.0);
}

TEST_CASE("one calibration point yields the whole line") {
  const auto p = calibrate(Measure{}, constant(0.0, 1.0), responses({1.0}), 0.1);
  CHECK(std::get<double>(p.critical) == kInf);
  CHECK(p.predict(vec({0.0})).width() == kInf);
}

TEST_CASE("perfect predictions give a zero critical score") {
  const auto p = calibrate(Measure{}, constant(2.0, 1.0), responses({2, 2, 2, 2, 2}), 0.2);
  CHECK(std::get<double>(p.critical) == 0.0);
  const Interval iv = p.predict(vec({0.0}));
  CHECK(iv.lower == 2.0);
  CHECK(iv.upper == 2.0);
}

TEST_CASE("calibration rejects bad inputs") {
  CHECK_THROWS_AS(calibrate(Measure{}, constant(0, 1), Dataset(FeatureMatrix(0, 1), Eigen::VectorXd(0)), 0.1), Error);
  CHECK_THROWS_AS(calibrate(Measure{}, constant(0, 1), responses({1, 2}), 1.0), Error);
  CHECK_THROWS_AS(calibrate(Measure{}, constant(0, 1), responses({1, 2}), 0.0), Error);
  CHECK_THROWS_AS(calibrate(Measure{MeasureKind::standardized}, constant(0, 1), responses({1, 2}), 0.1), Error);
  CHECK_THROWS_AS(calibrate(Measure{}, std::make_shared<Estimator>(EstimatorSpec{}), responses({1, 2}), 0.1), Error);
}

TEST_CASE("mondrian with an empty class") {
  // Every point falls in class 0 of the threshold taxonomy (x1 = 5 > 0.2).
  FeatureMatrix x(9, 2);
  for (int i = 0; i < 9; ++i) x.row(i) << 0.0, 5.0;
  const Dataset d(x, vec({1, 2, 3, 4, 5, 6, 7, 8, 9}));
  const auto t = Taxonomy::feature_threshold(1, 0.2);
  const auto p = calibrate_mondrian(Measure{}, constant(0.0, 1.0), d, 0.2, t);
  CHECK(p.is_mondrian());
  CHECK(p.calib_sizes.at(0) == 9);
  CHECK(p.calib_sizes.at(1) == 0);
  CHECK(p.critical_for(0) == 8.0);
  CHECK(p.critical_for(1) == kInf);
  CHECK(p.predict(vec({0.0, 0.1})).width() == kInf);
  CHECK(p.predict(vec({0.0, 0.5})).width() == 16.0);
}

TEST_CASE("mondrian on identical class populations equals the global predictor per class") {
  // Two copies of the same residuals, one copy per class.
  FeatureMatrix x(20, 2);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 10; ++i) {
    x.row(i) << 0.0, 0.1;
    x.row(10 + i) << 0.0, 0.9;
    y(i) = y(10 + i) = i + 1.0;
  }
  const Dataset both(x, y);
  const Dataset half = both.subset(std::vector<Eigen::Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto t = Taxonomy::feature_threshold(1, 0.2);
  const auto m = calibrate_mondrian(Measure{}, constant(0, 1), both, 0.2, t);
  const auto g = calibrate(Measure{}, constant(0, 1), half, 0.2);
  CHECK(m.critical_for(0) == std::get<double>(g.critical));
  CHECK(m.critical_for(1) == std::get<double>(g.critical));
}

TEST_CASE("two-regime demo: per-class critical scores track the noise ratio") {
  // fig1_demo noise is 0.1 in one regime and 0.5 in the other.
  const Dataset cal = sample(GeneratorType::fig1_demo, 4000, 3);
  const auto t = Taxonomy::feature_threshold(1, 0.5);  // class 1 when s = 0
  const auto p = calibrate_mondrian(Measure{}, oracle(GeneratorType::fig1_demo), cal, 0.1, t);
  CHECK(p.critical_for(0) / p.critical_for(1) == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("split conformal is marginally valid on fresh draws") {
  const auto est = oracle(GeneratorType::type2_functional);
  for (const Measure& m : {Measure{MeasureKind::residual}, Measure{MeasureKind::interval},
                           Measure{MeasureKind::normalized}}) {
    const int draws = 400;
    int covered = 0;
    for (int r = 0; r < draws; ++r) {
      const Dataset cal = sample(GeneratorType::type2_functional, 49, static_cast<std::uint64_t>(r), 0);
      const Dataset test = sample(GeneratorType::type2_functional, 1, static_cast<std::uint64_t>(r), 1);
      const auto p = calibrate(m, est, cal, 0.2);
      covered += p.predict(test.x(0)).contains(test.y(0)) ? 1 : 0;
    }
    const double cov = static_cast<double>(covered) / draws;
    const double se = std::sqrt(0.2 * 0.8 / draws);
    CHECK(cov >= 0.8 - 3.0 * se);
    CHECK(cov <= 0.8 + 1.0 / 50.0 + 3.0 * se);
  }
}

TEST_CASE("normalized scores are pivotal under the oracle") {
  // With the oracle the normalized critical score is the same in every class.
  const auto est = oracle(GeneratorType::type3_lowdim);
  const Dataset cal = sample(GeneratorType::type3_lowdim, 9000, 12);
  const Taxonomy t = build_taxonomy(TaxonomyConfig{}, est, cal);
  const auto p = calibrate_mondrian(Measure{MeasureKind::normalized}, est, cal, 0.1, t);
  const auto g = calibrate(Measure{MeasureKind::normalized}, est, cal, 0.1);
  for (int c = 0; c < 3; ++c) {
    CHECK(p.critical_for(c) == doctest::Approx(std::get<double>(g.critical)).epsilon(0.05));
  }
  // Residual critical scores grow with the class noise level instead.
  const auto r = calibrate_mondrian(Measure{MeasureKind::residual}, est, cal, 0.1, t);
  CHECK(r.critical_for(0) < r.critical_for(1));
  CHECK(r.critical_for(1) < r.critical_for(2));
}
