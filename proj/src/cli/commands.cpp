#include "hetcp/cli/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "hetcp/cli/config.hpp"
#include "hetcp/cli/experiments.hpp"
#include "hetcp/csv.hpp"

namespace hetcp::cli {

namespace {

namespace fs = std::filesystem;

// Raw flag values; a flag only overrides the config when it was given.
struct Flags {
  std::string config;
  bool json = false;
  std::string type, family, data, train, predictor, scores, out, output_dir;
  std::string estimator, misspec, measures, taxonomy, types, quadratic_unit, oracle_type;
  int dim = 0, k = 50, repetitions = 20, n_bins = 3, tax_dim = 1;
  std::size_t n = 1000, n_test = 1000, n_cal = 1000, B = 2000;
  double alpha = 0.1, epsilon = 1e-8, xi = 0.2, test_fraction = 0.2, cal_fraction = 0.5, beta = 0.025,
         ks_level = 0.01;
  std::uint64_t seed = 0;
  bool mondrian = false;

  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

template <typename T>
void opt(CLI::App* app, Flags& f, const std::string& name, T& var, const std::string& help) {
  f.opts[name] = app->add_option("--" + name, var, help);
}

void add_common(CLI::App* app, Flags& f) {
  opt(app, f, "config", f.config, "JSON run config; explicit flags take precedence");
  app->add_flag("--json", f.json, "Machine-readable JSON on standard output");
  opt(app, f, "seed", f.seed, "Seed for every random draw");
  opt(app, f, "output-dir", f.output_dir, "Output directory (default $HETCP_OUTPUT_DIR or .)");
  opt(app, f, "out", f.out, "Output file");
}

void add_generator(CLI::App* app, Flags& f) {
  opt(app, f, "type", f.type, "Generator: type1|type2|type3|type4|example21|toy_cv|fig1_demo");
  opt(app, f, "family", f.family, "Pivotal family: normal|laplace|uniform|triangular|exponential");
  opt(app, f, "dim", f.dim, "Feature dimension (0 = generator default)");
}

void add_estimator(CLI::App* app, Flags& f) {
  opt(app, f, "estimator", f.estimator, "oracle|knn|constant");
  opt(app, f, "k", f.k, "Neighbours for knn");
  opt(app, f, "misspec", f.misspec,
      "Comma list of op[:param], e.g. sigma_shift:0.1,sigma_scale:5,quadratic");
  opt(app, f, "quadratic-unit", f.quadratic_unit, "Unit of quadratic_sigma: auto or a positive number");
}

void add_taxonomy(CLI::App* app, Flags& f) {
  opt(app, f, "taxonomy", f.taxonomy, "difficulty_bins|feature_threshold|single");
  opt(app, f, "n-bins", f.n_bins, "Equal-frequency difficulty classes");
  opt(app, f, "tax-dim", f.tax_dim, "Feature index for feature_threshold");
  opt(app, f, "xi", f.xi, "Threshold for feature_threshold");
}

void add_measures(CLI::App* app, Flags& f) {
  opt(app, f, "measures", f.measures, "Comma list of res,int,norm,std");
  opt(app, f, "epsilon", f.epsilon, "Stabilizer added to sigma_hat");
  opt(app, f, "alpha", f.alpha, "Miscoverage level");
}

std::vector<MisspecOp> parse_misspec_list(const std::string& text) {
  std::vector<MisspecOp> ops;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item == "none") continue;
    const auto colon = item.find(':');
    MisspecOp op;
    op.kind = parse_misspec_kind(item.substr(0, colon));
    op.param = op.kind == MisspecKind::sigma_scale ? 1.0 : 0.0;
    if (colon != std::string::npos) {
      const auto v = parse_double(std::string_view(item).substr(colon + 1));
      if (!v) throw config_error("bad misspecification parameter in '" + item + "'");
      if (op.kind == MisspecKind::quadratic_sigma) {
        op.unit = *v;
      } else {
        op.param = *v;
      }
    }
    op.validate();
    ops.push_back(op);
  }
  return ops;
}

RunConfig build_config(const Flags& f, RunConfig cfg) {
  if (f.given("config")) cfg = load_config(f.config, std::move(cfg));
  if (f.given("seed")) cfg.seed = f.seed;
  if (f.given("type") || f.given("family") || f.given("dim") || f.given("n")) {
    GeneratorSpec g = cfg.generator.value_or(GeneratorSpec{});
    if (f.given("type")) g.type = parse_generator_type(f.type);
    if (f.given("family")) g.family = parse_family(f.family);
    if (f.given("dim")) g.dim = f.dim;
    if (f.given("n")) g.n = f.n;
    cfg.generator = g;
  }
  if (f.given("data")) cfg.csv_path = f.data;
  if (f.given("estimator")) cfg.estimator.kind = parse_estimator_kind(f.estimator);
  if (f.given("k")) cfg.estimator.k = f.k;
  if (f.given("misspec")) cfg.estimator.wrappers = parse_misspec_list(f.misspec);
  if (f.given("quadratic-unit")) {
    if (f.quadratic_unit == "auto") {
      cfg.quadratic_unit.reset();
    } else {
      const auto v = parse_double(f.quadratic_unit);
      if (!v) throw config_error("--quadratic-unit expects 'auto' or a number");
      cfg.quadratic_unit = *v;
    }
  }
  if (f.given("measures")) cfg.measures = parse_measure_list(f.measures, f.epsilon);
  if (f.given("epsilon")) {
    for (auto& m : cfg.measures) m.epsilon = f.epsilon;
  }
  if (f.given("alpha")) cfg.alpha = f.alpha;
  if (f.given("taxonomy")) cfg.taxonomy.kind = parse_taxonomy_kind(f.taxonomy);
  if (f.given("n-bins")) cfg.taxonomy.n_bins = f.n_bins;
  if (f.given("tax-dim")) cfg.taxonomy.dim = f.tax_dim;
  if (f.given("xi")) cfg.taxonomy.xi = f.xi;
  if (f.given("mondrian")) cfg.mondrian = f.mondrian;
  if (f.given("repetitions")) cfg.repetitions = f.repetitions;
  if (f.given("n-test")) cfg.n_test = f.n_test;
  if (f.given("n-cal")) cfg.n_cal = f.n_cal;
  if (f.given("output-dir")) cfg.output_dir = f.output_dir;
  if (f.given("test-fraction")) cfg.split.test_fraction = f.test_fraction;
  if (f.given("cal-fraction")) cfg.split.calibration_fraction_of_train = f.cal_fraction;
  if (f.given("B")) cfg.bootstrap_b = f.B;
  if (f.given("beta")) cfg.bootstrap_beta = f.beta;
  if (f.given("ks-level")) cfg.ks_level = f.ks_level;
  cfg.split.seed = cfg.seed;
  if (cfg.quadratic_unit) {
    for (auto& op : cfg.estimator.wrappers) {
      if (op.kind == MisspecKind::quadratic_sigma) op.unit = *cfg.quadratic_unit;
    }
  }
  return cfg;
}

std::string output_path(const RunConfig& cfg, const Flags& f, const std::string& default_name) {
  if (f.given("out")) return f.out;
  const fs::path dir = resolve_output_dir(cfg.output_dir);
  return (dir / default_name).string();
}

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write '" + path + "'");
  return out;
}

bool uses_auto_quadratic(const RunConfig& cfg) {
  if (cfg.quadratic_unit) return false;
  for (const auto& op : cfg.estimator.wrappers) {
    if (op.kind == MisspecKind::quadratic_sigma) return true;
  }
  return false;
}

double auto_quadratic_unit(const GeneratedData& g) {
  double v = 0.0;
  for (const auto& t : g.truths) v += t.sigma * t.sigma;
  return 2.0 * v / static_cast<double>(g.truths.size());
}

void set_quadratic_unit(EstimatorSpec& spec, double unit) {
  for (auto& op : spec.wrappers) {
    if (op.kind == MisspecKind::quadratic_sigma) op.unit = unit;
  }
}

std::string fmt(double v, int precision = 4) {
  if (!std::isfinite(v)) return format_double(v);
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Flags& f, std::ostream& out) {
  RunConfig cfg = build_config(f, {});
  if (!cfg.generator) throw config_error("synth needs --type");
  GeneratorSpec g = *cfg.generator;
  g.seed = cfg.seed;
  const GeneratedData data = generate(g);
  const std::string path = output_path(
      cfg, f, to_string(g.type) + "_n" + std::to_string(g.n) + "_s" + std::to_string(cfg.seed) + ".csv");
  {
    auto file = open_output(path);
    const TruthColumns truth = data.truth_columns();
    write_dataset_csv(file, data.data, &truth);
  }
  if (f.json) {
    out << json{{"path", path}, {"rows", g.n}, {"dim", g.resolved_dim()}, {"type", to_string(g.type)},
                {"family", to_string(g.family)}, {"seed", cfg.seed}}
               .dump(2)
        << '\n';
  } else {
    out << "wrote " << g.n << " rows (" << to_string(g.type) << ", dim " << g.resolved_dim() << ", "
        << to_string(g.family) << ") to " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- calibrate

std::shared_ptr<const Estimator> make_estimator(const RunConfig& cfg, EstimatorSpec spec,
                                                const std::optional<GeneratorType>& generator,
                                                const Dataset* train) {
  auto est = std::make_shared<Estimator>(std::move(spec));
  if (generator) est->attach_generator(*generator);
  if (est->spec().kind == EstimatorKind::knn) {
    if (!train) throw config_error("knn needs training data (--train)");
    est->fit(*train);
  }
  if (!est->ready()) throw config_error("estimator '" + to_string(est->spec().kind) + "' is not usable here");
  (void)cfg;
  return est;
}

int cmd_calibrate(const Flags& f, std::ostream& out) {
  RunConfig cfg = build_config(f, {});
  cfg.validate();
  const Measure measure = cfg.measures.front();

  Dataset calib;
  std::optional<Dataset> train;
  std::optional<GeneratorType> gen_type;
  EstimatorSpec spec = cfg.estimator;
  spec.seed = derive_seed(cfg.seed, 0xe5);
  if (cfg.generator) {
    GeneratorSpec g = *cfg.generator;
    g.seed = cfg.seed;
    g.n = cfg.n_cal;
    g.stream = 0;
    const GeneratedData gd = generate(g);
    calib = gd.data;
    gen_type = g.type;
    if (uses_auto_quadratic(cfg)) set_quadratic_unit(spec, auto_quadratic_unit(gd));
    if (spec.kind == EstimatorKind::knn) {
      g.stream = 2;
      train = generate(g).data;
    }
  } else {
    calib = read_dataset_csv_file(*cfg.csv_path).data;
    if (f.given("train")) train = read_dataset_csv_file(f.train).data;
    if (f.given("oracle-type")) gen_type = parse_generator_type(f.oracle_type);
  }
  const auto est = make_estimator(cfg, spec, gen_type, train ? &*train : nullptr);

  CalibratedPredictor p;
  if (cfg.mondrian) {
    const Taxonomy t = build_taxonomy(cfg.taxonomy, est, calib);
    p = calibrate_mondrian(measure, est, calib, cfg.alpha, t);
  } else {
    p = calibrate(measure, est, calib, cfg.alpha);
  }
  const std::string path = output_path(cfg, f, "predictor.json");
  {
    auto file = open_output(path);
    file << to_json(p).dump(2) << '\n';
  }
  if (f.json) {
    json j = to_json(p);
    j.erase("estimator");
    j["path"] = path;
    out << j.dump(2) << '\n';
  } else {
    out << "calibrated " << to_string(measure.kind) << (p.is_mondrian() ? " (mondrian)" : " (global)")
        << " on " << calib.size() << " points, alpha " << cfg.alpha << '\n';
    if (p.is_mondrian()) {
      for (const auto& [c, a] : std::get<ClassCritical>(p.critical)) {
        out << "  class " << c << ": a* = " << fmt(a, 6) << " (n = " << p.calib_sizes.at(c) << ")\n";
      }
    } else {
      out << "  a* = " << fmt(std::get<double>(p.critical), 6) << '\n';
    }
    out << "predictor written to " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- predict

CalibratedPredictor load_predictor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open predictor '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw data_error("predictor '" + path + "': " + e.what());
  }
  return predictor_from_json(j);
}

int cmd_predict(const Flags& f, std::ostream& out) {
  if (!f.given("predictor")) throw config_error("predict needs --predictor");
  if (!f.given("data")) throw config_error("predict needs --data");
  const CalibratedPredictor p = load_predictor(f.predictor);
  const Dataset data = read_dataset_csv_file(f.data).data;

  json rows = json::array();
  std::ostringstream csv;
  csv << "lower,upper,class\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto x = data.x(i);
    const Interval iv = p.predict(x);
    const int cls = p.taxonomy ? p.taxonomy->classify(x) : 0;
    csv << format_double(iv.lower) << ',' << format_double(iv.upper) << ',' << cls << '\n';
    rows.push_back({{"lower", number_to_json(iv.lower)}, {"upper", number_to_json(iv.upper)}, {"class", cls}});
  }
  if (f.given("out")) {
    auto file = open_output(f.out);
    file << csv.str();
  }
  if (f.json) {
    out << rows.dump(2) << '\n';
  } else if (!f.given("out")) {
    out << csv.str();
  } else {
    out << "wrote " << data.size() << " intervals to " << f.out << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate

void print_cells(std::ostream& out, const std::vector<ExperimentCell>& cells) {
  for (const auto& cell : cells) {
    out << std::left << std::setw(5) << to_string(cell.measure.kind) << std::setw(10)
        << (cell.mondrian ? "mondrian" : "global");
    for (const auto& s : cell.summary) {
      if (s.metric != "coverage") continue;
      out << "  " << s.group << ' ' << fmt(s.mean, 3) << "+-" << fmt(s.std, 3);
    }
    out << '\n';
  }
}

json cells_to_json(const std::vector<ExperimentCell>& cells) {
  json arr = json::array();
  for (const auto& cell : cells) {
    arr.push_back({{"measure", to_string(cell.measure.kind)},
                   {"mondrian", cell.mondrian},
                   {"summary", to_json(std::span<const MetricSummary>(cell.summary))}});
  }
  return arr;
}

int cmd_evaluate(const Flags& f, std::ostream& out) {
  if (f.given("predictor")) {
    if (!f.given("data")) throw config_error("evaluate --predictor needs --data");
    const CalibratedPredictor p = load_predictor(f.predictor);
    const Dataset data = read_dataset_csv_file(f.data).data;
    const Taxonomy t = p.taxonomy.value_or(Taxonomy::single());
    const EvalReport r = evaluate(p, data, t);
    const auto summary = aggregate(std::span<const EvalReport>(&r, 1));
    if (f.given("out")) {
      auto file = open_output(f.out);
      write_summary_csv(file, summary);
    }
    if (f.json) {
      out << to_json(r).dump(2) << '\n';
    } else {
      out << "coverage " << fmt(r.marginal_coverage) << "  width " << fmt(r.marginal_width) << "  n " << r.n_test
          << '\n';
      for (const auto& [c, cell] : r.per_class) {
        out << "  class " << c << ": n " << cell.count << "  coverage "
            << (cell.coverage ? fmt(*cell.coverage) : "missing") << "  width "
            << (cell.width ? fmt(*cell.width) : "missing") << '\n';
      }
    }
    return 0;
  }

  RunConfig base;
  base.repetitions = 1;
  RunConfig cfg = build_config(f, base);
  std::vector<ExperimentCell> cells;
  if (cfg.csv_path && !cfg.generator) {
    // Real data goes through k-NN unless another non-oracle estimator was asked for.
    if (cfg.estimator.kind == EstimatorKind::oracle) cfg.estimator.kind = EstimatorKind::knn;
    cfg.validate();
    CsvExperiment ex;
    ex.estimator = cfg.estimator;
    ex.taxonomy = cfg.taxonomy;
    ex.measures = cfg.measures;
    ex.alpha = cfg.alpha;
    ex.repetitions = cfg.repetitions;
    ex.split = cfg.split;
    cells = run_csv_experiment(read_dataset_csv_file(*cfg.csv_path).data, ex);
  } else {
    cfg.validate();
    SyntheticExperiment ex;
    ex.generator = *cfg.generator;
    ex.estimator = cfg.estimator;
    ex.taxonomy = cfg.taxonomy;
    ex.measures = cfg.measures;
    ex.alpha = cfg.alpha;
    ex.repetitions = cfg.repetitions;
    ex.n_cal = cfg.n_cal;
    ex.n_test = cfg.n_test;
    ex.seed = cfg.seed;
    ex.quadratic_unit_from_data = uses_auto_quadratic(cfg);
    cells = run_synthetic_experiment(ex);
  }
  const std::string path = output_path(cfg, f, "evaluate.csv");
  {
    auto file = open_output(path);
    write_cells_csv(file, cells);
  }
  if (f.json) {
    out << json{{"path", path}, {"cells", cells_to_json(cells)}}.dump(2) << '\n';
  } else {
    print_cells(out, cells);
    out << "summary written to " << path << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- table

int cmd_table(const Flags& f, std::ostream& out) {
  RunConfig cfg = build_config(f, {});
  cfg.validate(false);
  TableOptions opt;
  opt.alpha = cfg.alpha;
  opt.repetitions = cfg.repetitions;
  opt.n_test = cfg.n_test;
  opt.n_cal = cfg.n_cal;
  opt.dim = cfg.generator && cfg.generator->dim > 0 ? cfg.generator->dim : 15;
  opt.n_bins = cfg.taxonomy.n_bins;
  opt.measures = cfg.measures;
  opt.seed = cfg.seed;
  for (const auto& m : opt.measures) {
    if (m.kind == MeasureKind::standardized) throw config_error("table: 'std' is a diagnostic-only measure");
  }
  if (f.given("misspec")) {
    if (f.misspec == "quadratic" || f.misspec == "quadratic_sigma") {
      opt.quadratic = true;
    } else if (f.misspec != "none") {
      throw config_error("table: --misspec accepts 'none' or 'quadratic'");
    }
  }
  const auto cells = run_table(opt);
  const std::string path = output_path(cfg, f, opt.quadratic ? "table2.csv" : "table1.csv");
  {
    auto file = open_output(path);
    write_cells_csv(file, cells);
  }
  if (f.json) {
    out << json{{"path", path}, {"quadratic", opt.quadratic}, {"cells", cells_to_json(cells)}}.dump(2) << '\n';
    return 0;
  }
  out << (opt.quadratic ? "misspecified (quadratic sigma)" : "oracle") << " toy model, alpha " << opt.alpha << ", "
      << opt.repetitions << " x " << opt.n_test << " test points\n";
  out << std::left << std::setw(16) << "" << std::setw(16) << "marginal";
  for (int c = 0; c < opt.n_bins; ++c) out << std::setw(16) << ("class " + std::to_string(c));
  out << '\n';
  for (const auto& cell : cells) {
    out << std::setw(16) << (to_string(cell.measure.kind) + (cell.mondrian ? " mondrian" : ""));
    for (const auto& s : cell.summary) {
      if (s.metric == "coverage") out << std::setw(16) << (fmt(s.mean, 3) + " +- " + fmt(s.std, 3));
    }
    out << '\n';
  }
  out << "written to " << path << '\n';
  return 0;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Flags& f, std::ostream& out) {
  RunConfig base;
  base.repetitions = 10;
  base.measures = {Measure{MeasureKind::residual}, Measure{MeasureKind::interval}, Measure{MeasureKind::normalized}};
  RunConfig cfg = build_config(f, base);
  cfg.validate(false);
  SweepOptions opt;
  if (f.given("types")) {
    opt.types.clear();
    std::stringstream ss(f.types);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) opt.types.push_back(parse_generator_type(item));
    }
  }
  if (cfg.generator) {
    opt.family = cfg.generator->family;
    opt.dim = cfg.generator->dim;
  }
  opt.measures = cfg.measures;
  opt.alpha = cfg.alpha;
  opt.repetitions = cfg.repetitions;
  opt.n_cal = cfg.n_cal;
  opt.n_test = cfg.n_test;
  opt.n_bins = cfg.taxonomy.n_bins;
  opt.seed = cfg.seed;
  const auto rows = run_sweep(opt);
  const std::string path = output_path(cfg, f, "sweep.csv");
  {
    auto file = open_output(path);
    write_sweep_csv(file, rows);
  }
  if (f.json) {
    json arr = json::array();
    for (const auto& row : rows) {
      arr.push_back({{"type", to_string(row.type)},
                     {"misspec", row.column},
                     {"measure", to_string(row.cell.measure.kind)},
                     {"mondrian", row.cell.mondrian},
                     {"summary", to_json(std::span<const MetricSummary>(row.cell.summary))}});
    }
    out << json{{"path", path}, {"rows", arr}}.dump(2) << '\n';
  } else {
    out << "sweep: " << rows.size() << " cells (" << opt.types.size() << " types x " << opt.columns.size()
        << " misspecifications x " << opt.measures.size() << " measures x {global, mondrian}) written to " << path
        << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- diagnose

struct ScoreSet {
  std::string measure;
  std::vector<double> scores;
  std::vector<int> classes;
};

std::vector<ScoreSet> read_score_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open score file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw data_error("score file: missing header");
  const auto header = split_csv_line(line);
  int col_score = -1, col_class = -1, col_measure = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "score") col_score = static_cast<int>(i);
    if (header[i] == "class") col_class = static_cast<int>(i);
    if (header[i] == "measure") col_measure = static_cast<int>(i);
  }
  if (col_score < 0 || col_class < 0) throw data_error("score file: header needs 'score' and 'class' columns");
  std::map<std::string, ScoreSet> sets;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw data_error("score file: row " + std::to_string(row) + " has wrong field count");
    const auto s = parse_double(fields[static_cast<std::size_t>(col_score)]);
    const auto c = parse_double(fields[static_cast<std::size_t>(col_class)]);
    if (!s || !std::isfinite(*s)) throw data_error("score file: row " + std::to_string(row) + " has a bad score");
    if (!c || *c != std::floor(*c) || *c < 0) throw data_error("score file: row " + std::to_string(row) + " has a bad class");
    const std::string m = col_measure >= 0 ? std::string(fields[static_cast<std::size_t>(col_measure)]) : "scores";
    auto& set = sets[m];
    set.measure = m;
    set.scores.push_back(*s);
    set.classes.push_back(static_cast<int>(*c));
  }
  if (sets.empty()) throw data_error("score file: no rows");
  std::vector<ScoreSet> out;
  for (auto& [name, set] : sets) out.push_back(std::move(set));
  return out;
}

int cmd_diagnose(const Flags& f, std::ostream& out) {
  RunConfig cfg = build_config(f, {});
  std::vector<ScoreSet> sets;
  if (f.given("scores")) {
    cfg.validate(false);
    sets = read_score_file(f.scores);
  } else {
    cfg.validate();
    Dataset calib;
    std::optional<Dataset> train;
    std::optional<GeneratorType> gen_type;
    EstimatorSpec spec = cfg.estimator;
    spec.seed = derive_seed(cfg.seed, 0xe5);
    if (cfg.generator) {
      GeneratorSpec g = *cfg.generator;
      g.seed = cfg.seed;
      g.n = cfg.n_cal;
      const GeneratedData gd = generate(g);
      calib = gd.data;
      gen_type = g.type;
      if (uses_auto_quadratic(cfg)) set_quadratic_unit(spec, auto_quadratic_unit(gd));
      if (spec.kind == EstimatorKind::knn) {
        g.stream = 2;
        train = generate(g).data;
      }
    } else {
      if (spec.kind == EstimatorKind::oracle) spec.kind = EstimatorKind::knn;
      const Dataset all = read_dataset_csv_file(*cfg.csv_path).data;
      DataSplit parts = split_dataset(all, cfg.split);
      train = std::move(parts.train);
      calib = std::move(parts.calibration);
    }
    const auto est = make_estimator(cfg, spec, gen_type, train ? &*train : nullptr);
    const Taxonomy t = build_taxonomy(cfg.taxonomy, est, calib);
    const auto classes = classify_all(t, calib);
    for (const auto& m : cfg.measures) {
      sets.push_back({to_string(m.kind), calibration_scores(m, *est, calib, cfg.alpha), classes});
    }
  }

  DiagnosisOptions opt;
  opt.alpha = cfg.alpha;
  opt.B = cfg.bootstrap_b;
  opt.beta = cfg.bootstrap_beta;
  opt.ks_level = cfg.ks_level;
  opt.seed = cfg.seed;

  json report{{"alpha", cfg.alpha}, {"B", opt.B}, {"beta", opt.beta}, {"ks_level", opt.ks_level}};
  json measures = json::array();
  std::vector<std::string> ecdf_paths;
  for (const auto& set : sets) {
    const std::string ecdf_path = output_path(cfg, Flags{}, "ecdf_" + set.measure + ".csv");
    {
      auto file = open_output(ecdf_path);
      write_ecdf_csv(file, ecdf_by_class(set.scores, set.classes));
    }
    ecdf_paths.push_back(ecdf_path);
    json pairs = json::array();
    for (const auto& d : diagnose_scores(set.measure, set.scores, set.classes, opt)) {
      pairs.push_back({{"classes", {d.bootstrap.class1, d.bootstrap.class2}},
                       {"bootstrap", to_json(d.bootstrap)},
                       {"ks", {{"statistic", d.ks.statistic},
                               {"p_value", d.ks.p_value},
                               {"verdict", verdict(d.ks_rejects)}}}});
    }
    measures.push_back({{"measure", set.measure}, {"ecdf", ecdf_path}, {"pairs", pairs}});
  }
  report["measures"] = measures;
  const std::string path = output_path(cfg, f, "diagnose.json");
  {
    auto file = open_output(path);
    file << report.dump(2) << '\n';
  }
  if (f.json) {
    out << report.dump(2) << '\n';
    return 0;
  }
  for (const auto& m : report["measures"]) {
    out << m["measure"].get<std::string>() << '\n';
    for (const auto& p : m["pairs"]) {
      const auto& b = p["bootstrap"];
      out << "  classes " << p["classes"][0] << " vs " << p["classes"][1] << ": bootstrap CI ["
          << fmt(number_from_json(b["ci"][0])) << ", " << fmt(number_from_json(b["ci"][1])) << "] "
          << b["verdict"].get<std::string>() << "; KS D " << fmt(p["ks"]["statistic"].get<double>()) << " p "
          << fmt(p["ks"]["p_value"].get<double>()) << ' ' << p["ks"]["verdict"].get<std::string>() << '\n';
    }
  }
  out << "report written to " << path << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal prediction intervals for heteroskedastic regression"};
  app.require_subcommand(1);
  Flags fsy, fca, fpr, fev, fta, fsw, fdi;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with truth columns");
  add_common(synth, fsy);
  add_generator(synth, fsy);
  opt(synth, fsy, "n", fsy.n, "Rows to generate");

  auto* cal = app.add_subcommand("calibrate", "Calibrate a conformal predictor and save it as JSON");
  add_common(cal, fca);
  add_generator(cal, fca);
  add_estimator(cal, fca);
  add_taxonomy(cal, fca);
  add_measures(cal, fca);
  opt(cal, fca, "data", fca.data, "Calibration CSV");
  opt(cal, fca, "train", fca.train, "Training CSV for knn");
  opt(cal, fca, "oracle-type", fca.oracle_type, "Generator behind a CSV, for the oracle estimator");
  opt(cal, fca, "n-cal", fca.n_cal, "Calibration points to generate");
  fca.opts["mondrian"] = cal->add_flag("--mondrian", fca.mondrian, "Per-class critical scores");

  auto* pred = app.add_subcommand("predict", "Prediction intervals for a CSV");
  add_common(pred, fpr);
  opt(pred, fpr, "predictor", fpr.predictor, "Predictor JSON from calibrate");
  opt(pred, fpr, "data", fpr.data, "Feature CSV");

  auto* eval = app.add_subcommand("evaluate", "Coverage and width, for a saved predictor or a full protocol");
  add_common(eval, fev);
  add_generator(eval, fev);
  add_estimator(eval, fev);
  add_taxonomy(eval, fev);
  add_measures(eval, fev);
  opt(eval, fev, "predictor", fev.predictor, "Predictor JSON from calibrate");
  opt(eval, fev, "data", fev.data, "CSV dataset");
  opt(eval, fev, "repetitions", fev.repetitions, "Repetitions");
  opt(eval, fev, "n-test", fev.n_test, "Test points per repetition");
  opt(eval, fev, "n-cal", fev.n_cal, "Calibration points per repetition");
  opt(eval, fev, "test-fraction", fev.test_fraction, "Test share of a CSV dataset");
  opt(eval, fev, "cal-fraction", fev.cal_fraction, "Calibration share of the training part");

  auto* table = app.add_subcommand("table", "Coverage table on the constant-coefficient-of-variation toy model");
  add_common(table, fta);
  add_measures(table, fta);
  opt(table, fta, "misspec", fta.misspec, "none or quadratic");
  opt(table, fta, "dim", fta.dim, "Feature dimension");
  opt(table, fta, "n-bins", fta.n_bins, "Variance classes");
  opt(table, fta, "repetitions", fta.repetitions, "Test sets");
  opt(table, fta, "n-test", fta.n_test, "Points per test set");
  opt(table, fta, "n-cal", fta.n_cal, "Calibration points per repetition");

  auto* sweep = app.add_subcommand("sweep", "Conditional coverage across data types and misspecifications");
  add_common(sweep, fsw);
  add_measures(sweep, fsw);
  opt(sweep, fsw, "types", fsw.types, "Comma list of generator types (default type1..type4)");
  opt(sweep, fsw, "family", fsw.family, "Pivotal family");
  opt(sweep, fsw, "dim", fsw.dim, "Feature dimension");
  opt(sweep, fsw, "n-bins", fsw.n_bins, "Variance classes");
  opt(sweep, fsw, "repetitions", fsw.repetitions, "Repetitions per cell");
  opt(sweep, fsw, "n-test", fsw.n_test, "Test points per repetition");
  opt(sweep, fsw, "n-cal", fsw.n_cal, "Calibration points per repetition");

  auto* diag = app.add_subcommand("diagnose", "ECDF tables and quantile-difference verdicts per class pair");
  add_common(diag, fdi);
  add_generator(diag, fdi);
  add_estimator(diag, fdi);
  add_taxonomy(diag, fdi);
  add_measures(diag, fdi);
  opt(diag, fdi, "scores", fdi.scores, "CSV with score,class[,measure] columns");
  opt(diag, fdi, "data", fdi.data, "CSV dataset (split, knn)");
  opt(diag, fdi, "n-cal", fdi.n_cal, "Calibration points to generate");
  opt(diag, fdi, "B", fdi.B, "Bootstrap resamples");
  opt(diag, fdi, "beta", fdi.beta, "Bootstrap CI level");
  opt(diag, fdi, "ks-level", fdi.ks_level, "KS rejection level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(fsy, out);
    if (cal->parsed()) return cmd_calibrate(fca, out);
    if (pred->parsed()) return cmd_predict(fpr, out);
    if (eval->parsed()) return cmd_evaluate(fev, out);
    if (table->parsed()) return cmd_table(fta, out);
    if (sweep->parsed()) return cmd_sweep(fsw, out);
    if (diag->parsed()) return cmd_diagnose(fdi, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::config ? 2 : 3;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace hetcp::cli
