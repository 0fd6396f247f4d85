#include <doctest.h>

#include <sstream>
#include <string>

#include "hetcp/csv.hpp"
#include "hetcp/rng.hpp"

using namespace hetcp;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    (void)read_dataset_csv(in);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("reads a plain dataset") {
  std::istringstream in("x0,x1,y\n1,2,3\n4,5,6\n");
  const CsvTable t = read_dataset_csv(in);
  CHECK(t.data.size() == 2);
  CHECK(t.data.dim() == 2);
  CHECK(t.data.features()(1, 0) == 4.0);
  CHECK(t.data.y(1) == 6.0);
  CHECK_FALSE(t.truth.has_value());
}

TEST_CASE("reads truth columns, CRLF, BOM, blank lines and padded fields") {
  std::istringstream in("\xEF\xBB\xBFx0,y,mu,sigma\r\n 1.5 ,2,2.5,0.5\r\n\r\n-3e2,+4,1,1\r\n");
  const CsvTable t = read_dataset_csv(in);
  REQUIRE(t.truth.has_value());
  CHECK(t.data.size() == 2);
  CHECK(t.data.features()(0, 0) == 1.5);
  CHECK(t.data.features()(1, 0) == -300.0);
  CHECK(t.data.y(1) == 4.0);
  CHECK(t.truth->sigma(0) == 0.5);
}

TEST_CASE("malformed files name the offending row") {
  CHECK(error_of("") == "csv: missing header row");
  CHECK(error_of("a,b\n1,2\n") == "csv: header must start with x0");
  CHECK(error_of("x0,z\n1,2\n").find("expected column 'y'") != std::string::npos);
  CHECK(error_of("x0,y,extra\n1,2,3\n").find("unexpected columns") != std::string::npos);
  CHECK(error_of("x0,y\n") == "csv: no data rows");
  CHECK(error_of("x0,y\n1,2\n3\n") == "csv: row 2 has 1 fields, expected 2");
  CHECK(error_of("x0,y\n1,2\n3,abc\n") == "csv: row 2 column 'y' is not a finite number");
  CHECK(error_of("x0,y\n1,2\n3,4\nnan,1\n") == "csv: row 3 column 'x0' is not a finite number");
  CHECK(error_of("x0,y\ninf,1\n") == "csv: row 1 column 'x0' is not a finite number");
  CHECK(error_of("x0,y\n1,\n") == "csv: row 1 column 'y' is not a finite number");
}

TEST_CASE("write then read round-trips every bit") {
  RngStream rng(9);
  const int n = 50;
  FeatureMatrix x(n, 3);
  Eigen::VectorXd y(n);
  TruthColumns truth{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal() * std::pow(10.0, rng.below(30) - 15.0);
    y(i) = rng.normal();
    truth.mu(i) = rng.uniform();
    truth.sigma(i) = rng.uniform();
  }
  const Dataset d(x, y);
  std::stringstream io;
  write_dataset_csv(io, d, &truth);
  const CsvTable back = read_dataset_csv(io);
  CHECK(back.data.features() == d.features());
  CHECK(back.data.targets() == d.targets());
  REQUIRE(back.truth.has_value());
  CHECK(back.truth->mu == truth.mu);
  CHECK(back.truth->sigma == truth.sigma);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(parse_double(" 1e3 ") == 1000.0);
  CHECK_FALSE(parse_double("1.0x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(split_csv_line("a,,b\r").size() == 3);
}

TEST_CASE("missing file is a data error") {
  CHECK_THROWS_AS(read_dataset_csv_file("/nonexistent/dir/file.csv"), Error);
}
