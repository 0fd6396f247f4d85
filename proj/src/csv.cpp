#include "hetcp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace hetcp {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

CsvTable read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("csv: missing header row");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM

  std::vector<std::string> header;
  for (auto f : split_csv_line(line)) header.push_back(trimmed(f));

  std::size_t dim = 0;
  while (dim < header.size() && header[dim] == "x" + std::to_string(dim)) ++dim;
  if (dim == 0) throw data_error("csv: header must start with x0");
  if (dim >= header.size() || header[dim] != "y") throw data_error("csv: expected column 'y' after x" + std::to_string(dim - 1));
  bool has_truth = false;
  if (header.size() == dim + 3 && header[dim + 1] == "mu" && header[dim + 2] == "sigma") {
    has_truth = true;
  } else if (header.size() != dim + 1) {
    throw data_error("csv: unexpected columns after 'y' (only 'mu,sigma' are allowed)");
  }

  std::vector<double> values;
  std::size_t rows = 0;
  const std::size_t width = header.size();
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++rows;
    const auto fields = split_csv_line(line);
    if (fields.size() != width) {
      throw data_error("csv: row " + std::to_string(rows) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw data_error("csv: row " + std::to_string(rows) + " column '" + header[c] + "' is not a finite number");
      }
      values.push_back(*v);
    }
  }
  if (rows == 0) throw data_error("csv: no data rows");

  const auto n = static_cast<Eigen::Index>(rows);
  FeatureMatrix x(n, static_cast<Eigen::Index>(dim));
  Eigen::VectorXd y(n);
  TruthColumns truth{Eigen::VectorXd(has_truth ? n : 0), Eigen::VectorXd(has_truth ? n : 0)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* row = values.data() + static_cast<std::size_t>(i) * width;
    for (std::size_t c = 0; c < dim; ++c) x(i, static_cast<Eigen::Index>(c)) = row[c];
    y(i) = row[dim];
    if (has_truth) {
      truth.mu(i) = row[dim + 1];
      truth.sigma(i) = row[dim + 2];
    }
  }
  CsvTable table{Dataset(std::move(x), std::move(y)), std::nullopt};
  if (has_truth) table.truth = std::move(truth);
  return table;
}

CsvTable read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const TruthColumns* truth) {
  for (Eigen::Index c = 0; c < data.dim(); ++c) out << 'x' << c << ',';
  out << 'y';
  if (truth) out << ",mu,sigma";
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index c = 0; c < data.dim(); ++c) out << format_double(data.features()(i, c)) << ',';
    out << format_double(data.y(i));
    if (truth) out << ',' << format_double(truth->mu(i)) << ',' << format_double(truth->sigma(i));
    out << '\n';
  }
}

void write_dataset_csv_file(const std::string& path, const Dataset& data, const TruthColumns* truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path + "'");
  write_dataset_csv(out, data, truth);
}

}  // namespace hetcp
