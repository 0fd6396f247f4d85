#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetcp/core.hpp"

namespace hetcp {

/// Per-row generator truth stored next to a dataset.
struct TruthColumns {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
};

struct CsvTable {
  Dataset data;
  std::optional<TruthColumns> truth;
};

/// Reads the dataset schema: header `x0,...,x{d-1},y` optionally followed by
/// `mu,sigma`. Rows with missing or non-finite fields are rejected with their
/// 1-based data row number.
CsvTable read_dataset_csv(std::istream& in);
CsvTable read_dataset_csv_file(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data, const TruthColumns* truth = nullptr);
void write_dataset_csv_file(const std::string& path, const Dataset& data, const TruthColumns* truth = nullptr);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace hetcp
