#include "hetcp/cli/experiments.hpp"

#include <map>
#include <memory>
#include <ostream>

#include "hetcp/csv.hpp"
#include "hetcp/parallel.hpp"

namespace hetcp::cli {

namespace {

std::size_t cells_per_measure(bool global, bool mondrian) { return (global ? 1 : 0) + (mondrian ? 1 : 0); }

// Calibrates every requested (measure, global/Mondrian) cell and evaluates it.
std::vector<EvalReport> evaluate_cells(const std::vector<Measure>& measures, bool global, bool mondrian,
                                       const std::shared_ptr<const Estimator>& est, const Taxonomy& taxonomy,
                                       const Dataset& calib, const Dataset& test, double alpha) {
  std::vector<EvalReport> out;
  for (const auto& m : measures) {
    if (global) out.push_back(evaluate(calibrate(m, est, calib, alpha), test, taxonomy));
    if (mondrian) out.push_back(evaluate(calibrate_mondrian(m, est, calib, alpha, taxonomy), test, taxonomy));
  }
  return out;
}

std::vector<ExperimentCell> collect(const std::vector<Measure>& measures, bool global, bool mondrian,
                                    const std::vector<std::vector<EvalReport>>& per_rep) {
  std::vector<ExperimentCell> cells;
  for (const auto& m : measures) {
    if (global) cells.push_back({m, false, {}, {}});
    if (mondrian) cells.push_back({m, true, {}, {}});
  }
  for (const auto& reps : per_rep) {
    for (std::size_t c = 0; c < cells.size(); ++c) cells[c].reports.push_back(reps[c]);
  }
  for (auto& cell : cells) cell.summary = aggregate(cell.reports);
  return cells;
}

void check_cells(const std::vector<Measure>& measures, bool global, bool mondrian) {
  if (measures.empty()) throw config_error("at least one measure is required");
  if (cells_per_measure(global, mondrian) == 0) throw config_error("neither global nor Mondrian predictors requested");
}

}  // namespace

std::vector<ExperimentCell> run_synthetic_experiment(const SyntheticExperiment& cfg) {
  check_cells(cfg.measures, cfg.global, cfg.mondrian);
  if (cfg.repetitions < 1) throw config_error("repetitions must be at least 1");
  cfg.generator.validate();

  std::vector<std::vector<EvalReport>> per_rep(static_cast<std::size_t>(cfg.repetitions));
  parallel_for(per_rep.size(), [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, r);
    GeneratorSpec gen = cfg.generator;
    gen.seed = rep_seed;
    gen.n = cfg.n_cal;
    gen.stream = 0;
    const GeneratedData calib = generate(gen);
    gen.n = cfg.n_test;
    gen.stream = 1;
    const GeneratedData test = generate(gen);

    EstimatorSpec spec = cfg.estimator;
    spec.seed = derive_seed(rep_seed ^ cfg.estimator.seed, 0xe5);
    if (cfg.quadratic_unit_from_data) {
      double v = 0.0;
      for (const auto& t : calib.truths) v += t.sigma * t.sigma;
      v = 2.0 * v / static_cast<double>(calib.truths.size());
      for (auto& op : spec.wrappers) {
        if (op.kind == MisspecKind::quadratic_sigma) op.unit = v;
      }
    }
    auto est = std::make_shared<Estimator>(spec);
    est->attach_generator(gen.type);
    if (spec.kind == EstimatorKind::knn) {
      gen.n = cfg.n_cal;
      gen.stream = 2;
      est->fit(generate(gen).data);
    }
    const std::shared_ptr<const Estimator> shared = est;
    const Taxonomy taxonomy = build_taxonomy(cfg.taxonomy, shared, calib.data);
    per_rep[r] = evaluate_cells(cfg.measures, cfg.global, cfg.mondrian, shared, taxonomy, calib.data, test.data,
                                cfg.alpha);
  });
  return collect(cfg.measures, cfg.global, cfg.mondrian, per_rep);
}

std::vector<ExperimentCell> run_csv_experiment(const Dataset& data, const CsvExperiment& cfg) {
  check_cells(cfg.measures, cfg.global, cfg.mondrian);
  if (cfg.repetitions < 1) throw config_error("repetitions must be at least 1");
  if (cfg.estimator.kind == EstimatorKind::oracle) throw config_error("the oracle estimator needs a generator, not a CSV");

  std::vector<std::vector<EvalReport>> per_rep(static_cast<std::size_t>(cfg.repetitions));
  parallel_for(per_rep.size(), [&](std::size_t r) {
    SplitSpec split = cfg.split;
    split.seed = derive_seed(cfg.split.seed, r);
    const DataSplit parts = split_dataset(data, split);
    EstimatorSpec spec = cfg.estimator;
    spec.seed = derive_seed(split.seed, 0xe5);
    auto est = std::make_shared<Estimator>(spec);
    est->fit(parts.train);
    const std::shared_ptr<const Estimator> shared = est;
    const Taxonomy taxonomy = build_taxonomy(cfg.taxonomy, shared, parts.calibration);
    per_rep[r] = evaluate_cells(cfg.measures, cfg.global, cfg.mondrian, shared, taxonomy, parts.calibration,
                                parts.test, cfg.alpha);
  });
  return collect(cfg.measures, cfg.global, cfg.mondrian, per_rep);
}

void write_cells_csv(std::ostream& out, const std::vector<ExperimentCell>& cells, bool header,
                     const std::string& prefix, const std::string& prefix_header) {
  if (header) out << prefix_header << "measure,mondrian,class,metric,mean,std\n";
  for (const auto& cell : cells) {
    for (const auto& s : cell.summary) {
      out << prefix << to_string(cell.measure.kind) << ',' << (cell.mondrian ? "mondrian" : "global") << ','
          << s.group << ',' << s.metric << ',' << format_double(s.mean) << ',' << format_double(s.std) << '\n';
    }
  }
}

std::vector<ExperimentCell> run_table(const TableOptions& opt) {
  SyntheticExperiment cfg;
  cfg.generator.type = GeneratorType::toy_cv;
  cfg.generator.dim = opt.dim;
  cfg.estimator.kind = EstimatorKind::oracle;
  if (opt.quadratic) cfg.estimator.wrappers.push_back({MisspecKind::quadratic_sigma, 0.0, 1.0});
  cfg.quadratic_unit_from_data = opt.quadratic;
  cfg.taxonomy.kind = TaxonomyKind::difficulty_bins;
  cfg.taxonomy.n_bins = opt.n_bins;
  cfg.measures = opt.measures;
  cfg.alpha = opt.alpha;
  cfg.repetitions = opt.repetitions;
  cfg.n_cal = opt.n_cal;
  cfg.n_test = opt.n_test;
  cfg.seed = opt.seed;
  cfg.mondrian = opt.mondrian;
  return run_synthetic_experiment(cfg);
}

std::vector<MisspecColumn> default_misspec_columns() {
  return {
      {"oracle", {}},
      {"sigma_shift_0.01", {{MisspecKind::sigma_shift, 0.01}}},
      {"sigma_shift_0.1", {{MisspecKind::sigma_shift, 0.1}}},
      {"sigma_shift_1", {{MisspecKind::sigma_shift, 1.0}}},
      {"sigma_scale_5", {{MisspecKind::sigma_scale, 5.0}}},
      {"mu_shift_const_1", {{MisspecKind::mu_shift_const, 1.0}}},
      {"mu_shift_prop_1", {{MisspecKind::mu_shift_prop, 1.0}}},
  };
}

std::vector<SweepRow> run_sweep(const SweepOptions& opt) {
  std::vector<SweepRow> rows;
  for (auto type : opt.types) {
    for (const auto& column : opt.columns) {
      SyntheticExperiment cfg;
      cfg.generator.type = type;
      cfg.generator.family = type == GeneratorType::type4_bimodal ? PivotalFamily::normal : opt.family;
      cfg.generator.dim = opt.dim;
      cfg.estimator.kind = EstimatorKind::oracle;
      cfg.estimator.wrappers = column.wrappers;
      cfg.taxonomy.kind = TaxonomyKind::difficulty_bins;
      cfg.taxonomy.n_bins = opt.n_bins;
      cfg.measures = opt.measures;
      cfg.alpha = opt.alpha;
      cfg.repetitions = opt.repetitions;
      cfg.n_cal = opt.n_cal;
      cfg.n_test = opt.n_test;
      // Same data for every column of a type, so columns differ only by the misspecification.
      cfg.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(type));
      for (auto& cell : run_synthetic_experiment(cfg)) rows.push_back({type, column.name, std::move(cell)});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "type,misspec,measure,mondrian,class,metric,mean,std\n";
  for (const auto& row : rows) {
    write_cells_csv(out, {row.cell}, false, to_string(row.type) + "," + row.column + ",");
  }
}

std::vector<PairDiagnostic> diagnose_scores(const std::string& measure, std::span<const double> scores,
                                            std::span<const int> classes, const DiagnosisOptions& opt) {
  if (scores.size() != classes.size()) throw data_error("diagnose: score/class count mismatch");
  std::map<int, std::vector<double>> groups;
  for (std::size_t i = 0; i < scores.size(); ++i) groups[classes[i]].push_back(scores[i]);

  std::vector<PairDiagnostic> out;
  std::uint64_t pair_index = 0;
  for (auto a = groups.begin(); a != groups.end(); ++a) {
    for (auto b = std::next(a); b != groups.end(); ++b, ++pair_index) {
      PairDiagnostic d;
      d.measure = measure;
      d.bootstrap = bootstrap_quantile_diff(a->second, b->second, opt.alpha, opt.beta, opt.B,
                                            derive_seed(opt.seed, pair_index));
      d.bootstrap.class1 = a->first;
      d.bootstrap.class2 = b->first;
      d.ks = ks_two_sample(a->second, b->second);
      d.ks_rejects = d.ks.p_value < opt.ks_level;
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace hetcp::cli
