#include "hetcp/metrics.hpp"

#include <cmath>
#include <ostream>

#include "hetcp/csv.hpp"

namespace hetcp {

namespace {

struct Accumulator {
  std::size_t count = 0;
  std::size_t covered = 0;
  std::size_t n_infinite = 0;
  double width_sum = 0.0;

  void add(const Interval& iv, double y) {
    ++count;
    if (iv.contains(y)) ++covered;
    if (!iv.is_empty() && !iv.is_bounded()) {
      ++n_infinite;
    } else {
      width_sum += iv.width();
    }
  }
  double coverage() const { return static_cast<double>(covered) / static_cast<double>(count); }
  double width() const { return n_infinite > 0 ? kInf : width_sum / static_cast<double>(count); }
};

}  // namespace

EvalReport evaluate_intervals(std::span<const Interval> intervals, std::span<const double> y,
                              std::span<const int> classes, int n_classes, double alpha) {
  if (intervals.empty()) throw data_error("empty test set");
  if (intervals.size() != y.size()) throw data_error("evaluate: interval/response count mismatch");
  if (!classes.empty() && classes.size() != y.size()) throw data_error("evaluate: class label count mismatch");

  Accumulator all;
  std::vector<Accumulator> cells(static_cast<std::size_t>(std::max(n_classes, 0)));
  for (std::size_t i = 0; i < y.size(); ++i) {
    all.add(intervals[i], y[i]);
    if (!classes.empty()) {
      const int c = classes[i];
      if (c < 0 || c >= n_classes) throw data_error("evaluate: class id out of range");
      cells[static_cast<std::size_t>(c)].add(intervals[i], y[i]);
    }
  }

  EvalReport r;
  r.alpha = alpha;
  r.n_test = all.count;
  r.marginal_coverage = all.coverage();
  r.marginal_width = all.width();
  r.n_infinite = all.n_infinite;
  if (!classes.empty()) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      ClassCell cell;
      cell.count = cells[c].count;
      cell.n_infinite = cells[c].n_infinite;
      if (cell.count > 0) {
        cell.coverage = cells[c].coverage();
        cell.width = cells[c].width();
      }
      r.per_class[static_cast<int>(c)] = cell;
    }
  }
  return r;
}

EvalReport evaluate(const CalibratedPredictor& p, const Dataset& test, const Taxonomy& t) {
  if (test.empty()) throw data_error("empty test set");
  std::vector<Interval> intervals(static_cast<std::size_t>(test.size()));
  std::vector<double> y(intervals.size());
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    intervals[static_cast<std::size_t>(i)] = p.predict(test.x(i));
    y[static_cast<std::size_t>(i)] = test.y(i);
  }
  const auto classes = classify_all(t, test);
  return evaluate_intervals(intervals, y, classes, t.n_classes(), p.alpha);
}

namespace {

MetricSummary summarize(std::string group, std::string metric, const std::vector<double>& values) {
  MetricSummary s{std::move(group), std::move(metric), 0.0, 0.0, values.size()};
  if (values.empty()) {
    s.mean = s.std = std::nan("");
    return s;
  }
  for (double v : values) {
    if (std::isinf(v)) {
      s.mean = s.std = kInf;
      return s;
    }
  }
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace

std::vector<MetricSummary> aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw config_error("aggregate: no reports");
  const auto& first = reports.front();
  for (const auto& r : reports) {
    if (r.per_class.size() != first.per_class.size()) throw data_error("aggregate: mismatched class sets");
    for (const auto& [c, cell] : first.per_class) {
      if (!r.per_class.contains(c)) throw data_error("aggregate: mismatched class sets");
    }
    if (r.alpha != first.alpha) throw data_error("aggregate: mismatched alpha");
  }

  std::vector<MetricSummary> out;
  std::vector<double> cov;
  std::vector<double> wid;
  for (const auto& r : reports) {
    cov.push_back(r.marginal_coverage);
    wid.push_back(r.marginal_width);
  }
  out.push_back(summarize("marginal", "coverage", cov));
  out.push_back(summarize("marginal", "width", wid));
  for (const auto& [c, unused] : first.per_class) {
    cov.clear();
    wid.clear();
    for (const auto& r : reports) {
      const auto& cell = r.per_class.at(c);
      if (cell.coverage) cov.push_back(*cell.coverage);
      if (cell.width) wid.push_back(*cell.width);
    }
    out.push_back(summarize(std::to_string(c), "coverage", cov));
    out.push_back(summarize(std::to_string(c), "width", wid));
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const MetricSummary> rows) {
  out << "class,metric,mean,std\n";
  for (const auto& r : rows) {
    out << r.group << ',' << r.metric << ',' << format_double(r.mean) << ',' << format_double(r.std) << '\n';
  }
}

}  // namespace hetcp
