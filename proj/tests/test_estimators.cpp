#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hetcp/estimators.hpp"
#include "oracles.hpp"

using namespace hetcp;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Estimator oracle_for(GeneratorType type, std::vector<MisspecOp> wrappers = {}, std::uint64_t seed = 0) {
  EstimatorSpec spec;
  spec.wrappers = std::move(wrappers);
  spec.seed = seed;
  Estimator e(spec);
  e.attach_generator(type);
  return e;
}

// Brute-force k-NN on standardized features with its own scaling.
MeanVarEstimate knn_oracle(const Dataset& d, const Eigen::VectorXd& x, int k) {
  const auto n = d.size();
  Eigen::VectorXd mean = d.features().colwise().mean().transpose();
  Eigen::VectorXd sd(d.dim());
  for (Eigen::Index c = 0; c < d.dim(); ++c) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += std::pow(d.features()(i, c) - mean(c), 2);
    sd(c) = std::sqrt(s / static_cast<double>(n - 1));
    if (sd(c) == 0.0) sd(c) = 1.0;
  }
  std::vector<std::pair<double, Eigen::Index>> dist;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < d.dim(); ++c) s += std::pow((d.features()(i, c) - x(c)) / sd(c), 2);
    dist.emplace_back(s, i);
  }
  std::sort(dist.begin(), dist.end());
  double m = 0.0;
  for (int j = 0; j < k; ++j) m += d.y(dist[static_cast<std::size_t>(j)].second);
  m /= k;
  double v = 0.0;
  for (int j = 0; j < k; ++j) v += std::pow(d.y(dist[static_cast<std::size_t>(j)].second) - m, 2);
  return {m, k > 1 ? std::sqrt(v / (k - 1)) : 0.0};
}

}  // namespace

TEST_CASE("oracle estimator returns the generating parameters") {
  const Estimator e = oracle_for(GeneratorType::toy_cv);
  const auto est = e.predict(Eigen::VectorXd::Constant(15, 10.0));
  CHECK(est.mu_hat == doctest::Approx(10.0));
  CHECK(est.sigma_hat == doctest::Approx(1.0));
  CHECK(e.ready());
  CHECK_FALSE(Estimator(EstimatorSpec{}).ready());
  CHECK_THROWS_AS(Estimator(EstimatorSpec{}).predict(vec({0.1, 0.2})), Error);
}

TEST_CASE("constant estimator") {
  EstimatorSpec spec;
  spec.kind = EstimatorKind::constant;
  spec.mu = 2.0;
  spec.sigma = 0.5;
  const Estimator e(spec);
  CHECK(e.ready());
  CHECK(e.predict(vec({1.0})).mu_hat == 2.0);
  CHECK(e.predict(vec({1.0})).sigma_hat == 0.5);
  spec.sigma = -1.0;
  CHECK_THROWS_AS(Estimator{spec}, Error);
}

TEST_CASE("knn with three neighbours") {
  FeatureMatrix x(5, 1);
  x << 0, 1, 2, 10, 11;
  Eigen::VectorXd y(5);
  y << 1, 2, 3, 50, 60;
  EstimatorSpec spec;
  spec.kind = EstimatorKind::knn;
  spec.k = 3;
  Estimator e(spec);
  CHECK_FALSE(e.ready());
  CHECK_THROWS_AS(e.predict(vec({1.0})), Error);
  e.fit(Dataset(x, y));
  const auto est = e.predict(vec({1.0}));
  CHECK(est.mu_hat == doctest::Approx(2.0));
  CHECK(est.sigma_hat == doctest::Approx(1.0));
  CHECK_THROWS_AS(e.predict(vec({1.0, 2.0})), Error);
}

TEST_CASE("knn clamps k and gives zero spread for k = 1") {
  FeatureMatrix x(3, 1);
  x << 0, 1, 2;
  const Eigen::VectorXd y = vec({1, 2, 6});
  EstimatorSpec spec;
  spec.kind = EstimatorKind::knn;
  spec.k = 50;
  Estimator e(spec);
  e.fit(Dataset(x, y));
  CHECK(e.effective_k() == 3);
  CHECK(e.predict(vec({0.0})).mu_hat == doctest::Approx(3.0));
  spec.k = 1;
  Estimator one(spec);
  one.fit(Dataset(x, y));
  CHECK(one.predict(vec({2.1})).mu_hat == 6.0);
  CHECK(one.predict(vec({2.1})).sigma_hat == 0.0);
}

TEST_CASE("knn matches brute force and ignores row order") {
  GeneratorSpec g;
  g.type = GeneratorType::type3_lowdim;
  g.n = 300;
  g.seed = 21;
  const auto data = generate(g).data;
  EstimatorSpec spec;
  spec.kind = EstimatorKind::knn;
  spec.k = 15;
  Estimator e(spec);
  e.fit(data);

  std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.size()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::reverse(rows.begin(), rows.end());
  Estimator shuffled(spec);
  shuffled.fit(data.subset(rows));

  RngStream rng(3);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd q = vec({rng.uniform(), rng.uniform()});
    const auto a = e.predict(q);
    const auto want = knn_oracle(data, q, 15);
    CHECK(a.mu_hat == doctest::Approx(want.mu_hat).epsilon(1e-12));
    CHECK(a.sigma_hat == doctest::Approx(want.sigma_hat).epsilon(1e-12));
    const auto b = shuffled.predict(q);
    CHECK(a.mu_hat == b.mu_hat);
    CHECK(a.sigma_hat == b.sigma_hat);
  }
}

TEST_CASE("misspecification ops") {
  RngStream rng(1);
  const MeanVarEstimate base{1.0, 2.0};
  auto out = apply_misspec({MisspecKind::sigma_scale, 5.0}, base, rng);
  CHECK(out.mu_hat == 1.0);
  CHECK(out.sigma_hat == 10.0);

  // quadratic: sigma^2 = 0.5 -> 0.5 and sigma^2 = 1 -> 1.75
  out = apply_misspec({MisspecKind::quadratic_sigma, 0.0}, {0.0, std::sqrt(0.5)}, rng);
  CHECK(out.sigma_hat * out.sigma_hat == doctest::Approx(0.5));
  out = apply_misspec({MisspecKind::quadratic_sigma, 0.0}, {0.0, 1.0}, rng);
  CHECK(out.sigma_hat * out.sigma_hat == doctest::Approx(1.75));
  out = apply_misspec({MisspecKind::quadratic_sigma, 0.0, 4.0}, {0.0, 2.0}, rng);
  CHECK(out.sigma_hat * out.sigma_hat == doctest::Approx(4.0 * (5.0 * 0.25 + 0.5)));

  for (int i = 0; i < 1000; ++i) {
    CHECK(apply_misspec({MisspecKind::sigma_shift, 1.0}, {0.0, 0.1}, rng).sigma_hat >= 0.0);
  }
  CHECK(apply_misspec({MisspecKind::mu_shift_prop, 1.0}, {3.0, 0.0}, rng).mu_hat == 3.0);
  CHECK(apply_misspec({MisspecKind::mu_shift_const, 0.0}, {3.0, 1.0}, rng).mu_hat == 3.0);
}

TEST_CASE("shift noise has the requested spread") {
  RngStream rng(2);
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double d = apply_misspec({MisspecKind::mu_shift_prop, 0.5}, {0.0, 2.0}, rng).mu_hat;
    s += d;
    s2 += d * d;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("misspecified predictions are a deterministic function of x") {
  const Estimator e = oracle_for(GeneratorType::type3_lowdim, {{MisspecKind::sigma_shift, 1.0}}, 5);
  const Eigen::VectorXd x = vec({0.3, 0.4});
  const auto a = e.predict(x);
  const auto b = e.predict(x);
  CHECK(a.mu_hat == b.mu_hat);
  CHECK(a.sigma_hat == b.sigma_hat);
  CHECK(e.predict_base(x).sigma_hat == doctest::Approx(1.2));
  const Estimator other = oracle_for(GeneratorType::type3_lowdim, {{MisspecKind::sigma_shift, 1.0}}, 6);
  CHECK(other.predict(x).sigma_hat != a.sigma_hat);
  CHECK(feature_hash(x) == feature_hash(vec({0.3, 0.4})));
  CHECK(feature_hash(vec({0.0})) == feature_hash(vec({-0.0})));
  CHECK(feature_hash(x) != feature_hash(vec({0.4, 0.3})));
}

TEST_CASE("wrappers apply in order") {
  const Eigen::VectorXd x = vec({0.3, 0.4});
  const Estimator e = oracle_for(GeneratorType::type3_lowdim,
                                 {{MisspecKind::sigma_scale, 2.0}, {MisspecKind::quadratic_sigma, 0.0, 1.0}});
  const double s = 2.0 * 1.2;
  CHECK(e.predict(x).sigma_hat == doctest::Approx(std::sqrt(5.0 * std::pow(s * s - 0.5, 2) + 0.5)));
}

TEST_CASE("normal interval uses the two-sided quantile") {
  for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    const auto iv = mv_interval({1.0, 2.0}, alpha);
    const double z = oracle::normal_quantile(1.0 - alpha / 2.0);
    CHECK(iv.y_minus == doctest::Approx(1.0 - 2.0 * z).epsilon(1e-12));
    CHECK(iv.y_plus == doctest::Approx(1.0 + 2.0 * z).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mv_interval({0.0, 1.0}, 0.0), Error);
}

TEST_CASE("spec validation and names") {
  EstimatorSpec spec;
  spec.kind = EstimatorKind::knn;
  spec.k = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
  CHECK_THROWS_AS((MisspecOp{MisspecKind::sigma_scale, 0.0}.validate()), Error);
  CHECK_THROWS_AS((MisspecOp{MisspecKind::sigma_shift, -1.0}.validate()), Error);
  CHECK_THROWS_AS((MisspecOp{MisspecKind::quadratic_sigma, 0.0, 0.0}.validate()), Error);
  CHECK(parse_misspec_kind("quadratic") == MisspecKind::quadratic_sigma);
  CHECK(parse_misspec_kind("mu_shift_prop") == MisspecKind::mu_shift_prop);
  CHECK(parse_estimator_kind("knn") == EstimatorKind::knn);
  CHECK_THROWS_AS(parse_estimator_kind("forest"), Error);
}
