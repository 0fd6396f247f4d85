#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "hetcp/core.hpp"
#include "hetcp/rng.hpp"
#include "oracles.hpp"

using namespace hetcp;

namespace {

Dataset line_data(int n) {
  FeatureMatrix x(n, 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i;
    y(i) = 2.0 * i;
  }
  return Dataset(x, y);
}

}  // namespace

TEST_CASE("finite quantile picks the inflated order statistic") {
  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9};
  // (1 - 0.2)(1 + 1/9) * 9 = 8
  CHECK(finite_quantile(s, inflated_level(0.2, 9)) == 8.0);
  CHECK(finite_quantile(s, 0.5) == 5.0);
  CHECK(finite_quantile(s, 0.0) == 1.0);
  CHECK(finite_quantile(s, -1.0) == 1.0);
  CHECK(finite_quantile(s, 1.0) == 9.0);
  CHECK(finite_quantile(s, 1.0 + 1e-6) == kInf);
}

TEST_CASE("a single calibration score gives an infinite critical value") {
  const std::vector<double> s{0.3};
  CHECK(finite_quantile(s, inflated_level(0.1, 1)) == kInf);
}

TEST_CASE("empty calibration is a data error") {
  const std::vector<double> s;
  try {
    (void)finite_quantile(s, 0.5);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()) == "empty calibration");
  }
}

TEST_CASE("finite quantile is permutation invariant and monotone in beta") {
  RngStream rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + rng.below(40);
    std::vector<double> s(n);
    for (auto& v : s) v = rng.normal();
    const double b1 = rng.uniform() * 1.1;
    const double b2 = rng.uniform() * 1.1;
    const double q = finite_quantile(s, b1);
    std::vector<double> shuffled = s;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    CHECK(finite_quantile(shuffled, b1) == q);
    CHECK(finite_quantile(s, std::min(b1, b2)) <= finite_quantile(s, std::max(b1, b2)));
    if (b1 > 0.0 && b1 <= 1.0) CHECK(q == oracle::order_statistic_quantile(s, b1));
  }
}

TEST_CASE("inflated rank survives floating-point representation of (1-alpha)(n+1)") {
  for (long n = 1; n <= 200; ++n) {
    std::vector<double> s(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
    for (long a = 1; a <= 9; ++a) {
      const long k = oracle::inflated_rank(a, n);
      const double expected = k > n ? kInf : static_cast<double>(k);
      CHECK(finite_quantile(s, inflated_level(static_cast<double>(a) / 10.0, static_cast<std::size_t>(n))) ==
            expected);
    }
  }
}

TEST_CASE("exchangeable rank positions give coverage ceil((1-alpha)(n+1))/(n+1)") {
  // The test score takes each of the n+1 ranks with equal probability.
  for (long n = 1; n <= 12; ++n) {
    for (long a : {1L, 2L, 3L, 5L}) {
      long covered = 0;
      for (long pos = 1; pos <= n + 1; ++pos) {
        std::vector<double> cal;
        for (long r = 1; r <= n + 1; ++r) {
          if (r != pos) cal.push_back(static_cast<double>(r));
        }
        const double a_star = finite_quantile(cal, inflated_level(static_cast<double>(a) / 10.0, cal.size()));
        if (static_cast<double>(pos) <= a_star) ++covered;
      }
      CHECK(covered == std::min(oracle::inflated_rank(a, n), n + 1));
    }
  }
}

TEST_CASE("interval basics") {
  const Interval iv = Interval::make(-1.0, 2.0);
  CHECK(iv.contains(-1.0));
  CHECK(iv.contains(2.0));
  CHECK_FALSE(iv.contains(2.5));
  CHECK(iv.width() == 3.0);
  CHECK(iv.is_bounded());
  CHECK(Interval::empty().is_empty());
  CHECK(Interval::empty().width() == 0.0);
  CHECK_FALSE(Interval::empty().contains(0.0));
  CHECK(Interval::everything().width() == kInf);
  CHECK_FALSE(Interval::everything().is_bounded());
  CHECK_THROWS_AS(Interval::make(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("dataset validates shape and finiteness") {
  FeatureMatrix x(2, 1);
  x << 1, 2;
  CHECK_THROWS_AS(Dataset(x, Eigen::VectorXd::Zero(3)), Error);
  Eigen::VectorXd y(2);
  y << 1, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(x, y), Error);
  x(0, 0) = kInf;
  CHECK_THROWS_AS(Dataset(x, Eigen::VectorXd::Zero(2)), Error);
}

TEST_CASE("split sizes follow the fractions") {
  const Dataset d = line_data(100);
  const DataSplit s = split_dataset(d, SplitSpec{});
  CHECK(s.test.size() == 20);
  CHECK(s.calibration.size() == 40);
  CHECK(s.train.size() == 40);

  const DataSplit t = split_dataset(line_data(10), SplitSpec{});
  CHECK(t.train.size() == 4);
  CHECK(t.calibration.size() == 4);
  CHECK(t.test.size() == 2);
}

TEST_CASE("split is a deterministic partition") {
  const Dataset d = line_data(57);
  SplitSpec spec;
  spec.seed = 11;
  const DataSplit a = split_dataset(d, spec);
  const DataSplit b = split_dataset(d, spec);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.test_rows == b.test_rows);

  std::set<Eigen::Index> all;
  for (const auto* rows : {&a.train_rows, &a.calibration_rows, &a.test_rows}) all.insert(rows->begin(), rows->end());
  CHECK(all.size() == 57);
  CHECK(a.train_rows.size() + a.calibration_rows.size() + a.test_rows.size() == 57);
  for (std::size_t i = 0; i < a.test_rows.size(); ++i) {
    CHECK(a.test.y(static_cast<Eigen::Index>(i)) == 2.0 * static_cast<double>(a.test_rows[i]));
  }

  spec.seed = 12;
  CHECK(split_dataset(d, spec).test_rows != a.test_rows);
}

TEST_CASE("split rejects tiny datasets and bad fractions") {
  CHECK_THROWS_AS(split_dataset(line_data(3), SplitSpec{}), Error);
  SplitSpec bad;
  bad.test_fraction = 1.0;
  CHECK_THROWS_AS(split_dataset(line_data(10), bad), Error);
}
