#include "hetcp/serialization.hpp"

#include <cmath>

namespace hetcp {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("config: field '") + key + "' has the wrong type");
  }
}

std::string required_string(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw config_error(std::string(what) + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

}  // namespace

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw data_error("expected a number, got " + j.dump());
}

json to_json(const MisspecOp& op) {
  json j{{"op", to_string(op.kind)}};
  switch (op.kind) {
    case MisspecKind::sigma_scale:
      j["factor"] = op.param;
      break;
    case MisspecKind::quadratic_sigma:
      j["unit"] = op.unit;
      break;
    default:
      j["lambda"] = op.param;
      break;
  }
  return j;
}

MisspecOp misspec_from_json(const json& j) {
  MisspecOp op;
  op.kind = parse_misspec_kind(required_string(j, "op", "wrapper"));
  const double fallback = op.kind == MisspecKind::sigma_scale ? 1.0 : 0.0;
  op.param = get_or(j, "lambda", get_or(j, "factor", fallback));
  op.unit = get_or(j, "unit", 1.0);
  op.validate();
  return op;
}

json to_json(const EstimatorSpec& spec) {
  json j{{"kind", to_string(spec.kind)}, {"seed", spec.seed}};
  if (spec.kind == EstimatorKind::knn) j["k"] = spec.k;
  if (spec.kind == EstimatorKind::constant) {
    j["mu"] = spec.mu;
    j["sigma"] = spec.sigma;
  }
  j["wrappers"] = json::array();
  for (const auto& op : spec.wrappers) j["wrappers"].push_back(to_json(op));
  return j;
}

EstimatorSpec estimator_spec_from_json(const json& j) {
  EstimatorSpec spec;
  spec.kind = parse_estimator_kind(required_string(j, "kind", "estimator"));
  spec.k = get_or(j, "k", spec.k);
  spec.mu = get_or(j, "mu", spec.mu);
  spec.sigma = get_or(j, "sigma", spec.sigma);
  spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("wrappers")) {
    if (!j["wrappers"].is_array()) throw config_error("estimator: 'wrappers' must be an array");
    for (const auto& w : j["wrappers"]) spec.wrappers.push_back(misspec_from_json(w));
  }
  spec.validate();
  return spec;
}

json to_json(const Measure& m) { return {{"kind", to_string(m.kind)}, {"epsilon", m.epsilon}}; }

Measure measure_from_json(const json& j) {
  Measure m;
  if (j.is_string()) {
    m.kind = parse_measure_kind(j.get<std::string>());
  } else {
    m.kind = parse_measure_kind(required_string(j, "kind", "measure"));
    m.epsilon = get_or(j, "epsilon", m.epsilon);
  }
  m.validate();
  return m;
}

json to_json(const TaxonomyConfig& cfg) {
  json j{{"kind", to_string(cfg.kind)}};
  if (cfg.kind == TaxonomyKind::difficulty_bins) j["n_bins"] = cfg.n_bins;
  if (cfg.kind == TaxonomyKind::feature_threshold) {
    j["dim"] = cfg.dim;
    j["xi"] = cfg.xi;
  }
  return j;
}

TaxonomyConfig taxonomy_config_from_json(const json& j) {
  TaxonomyConfig cfg;
  cfg.kind = parse_taxonomy_kind(required_string(j, "kind", "taxonomy"));
  cfg.n_bins = get_or(j, "n_bins", cfg.n_bins);
  cfg.dim = get_or(j, "dim", cfg.dim);
  cfg.xi = get_or(j, "xi", cfg.xi);
  cfg.validate();
  return cfg;
}

json to_json(const Estimator& est) {
  json j{{"spec", to_json(est.spec())}};
  if (est.generator()) j["generator"] = to_string(*est.generator());
  if (est.spec().kind == EstimatorKind::knn) {
    const Dataset& d = est.training_data();
    json rows = json::array();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < d.dim(); ++c) row.push_back(d.features()(i, c));
      rows.push_back(std::move(row));
    }
    j["train_x"] = std::move(rows);
    j["train_y"] = std::vector<double>(d.targets().data(), d.targets().data() + d.size());
  }
  return j;
}

std::shared_ptr<const Estimator> estimator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("spec")) throw data_error("estimator: missing 'spec'");
  auto est = std::make_shared<Estimator>(estimator_spec_from_json(j["spec"]));
  if (j.contains("generator")) est->attach_generator(parse_generator_type(j["generator"].get<std::string>()));
  if (est->spec().kind == EstimatorKind::knn) {
    const auto& rows = j.at("train_x");
    const auto ys = j.at("train_y").get<std::vector<double>>();
    if (rows.size() != ys.size() || rows.empty()) throw data_error("estimator: inconsistent k-NN training data");
    const auto dim = static_cast<Eigen::Index>(rows[0].size());
    FeatureMatrix x(static_cast<Eigen::Index>(ys.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto row = rows[i].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != dim) throw data_error("estimator: ragged k-NN training rows");
      for (Eigen::Index c = 0; c < dim; ++c) x(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)];
    }
    est->fit(Dataset(std::move(x), Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()))));
  }
  return est;
}

json to_json(const Taxonomy& t) {
  json j{{"kind", to_string(t.kind())}};
  if (t.kind() == TaxonomyKind::feature_threshold) {
    j["dim"] = t.dim();
    j["xi"] = t.xi();
  }
  if (t.kind() == TaxonomyKind::difficulty_bins) j["edges"] = t.edges().edges;
  return j;
}

Taxonomy taxonomy_from_json(const json& j, std::shared_ptr<const Estimator> estimator) {
  switch (parse_taxonomy_kind(required_string(j, "kind", "taxonomy"))) {
    case TaxonomyKind::single:
      return Taxonomy::single();
    case TaxonomyKind::feature_threshold:
      return Taxonomy::feature_threshold(j.at("dim").get<int>(), j.at("xi").get<double>());
    case TaxonomyKind::difficulty_bins: {
      if (j.contains("estimator")) estimator = estimator_from_json(j["estimator"]);
      return Taxonomy::difficulty_bins(std::move(estimator), BinEdges{j.at("edges").get<std::vector<double>>()});
    }
  }
  throw std::logic_error("unknown taxonomy kind");
}

json to_json(const CalibratedPredictor& p) {
  json j{{"measure", to_json(p.measure)}, {"alpha", p.alpha}};
  if (p.estimator) j["estimator"] = to_json(*p.estimator);
  if (const auto* global = std::get_if<double>(&p.critical)) {
    j["critical"] = number_to_json(*global);
  } else {
    json crit = json::object();
    for (const auto& [c, a] : std::get<ClassCritical>(p.critical)) crit[std::to_string(c)] = number_to_json(a);
    j["critical"] = std::move(crit);
  }
  if (p.taxonomy) {
    j["taxonomy"] = to_json(*p.taxonomy);
    const auto& te = p.taxonomy->estimator();
    if (te && te != p.estimator) j["taxonomy"]["estimator"] = to_json(*te);
  }
  json sizes = json::object();
  for (const auto& [c, n] : p.calib_sizes) sizes[std::to_string(c)] = n;
  j["calib_sizes"] = std::move(sizes);
  return j;
}

CalibratedPredictor predictor_from_json(const json& j) {
  try {
    CalibratedPredictor p;
    p.measure = measure_from_json(j.at("measure"));
    p.alpha = j.at("alpha").get<double>();
    p.estimator = estimator_from_json(j.at("estimator"));
    const auto& crit = j.at("critical");
    if (crit.is_object()) {
      ClassCritical map;
      for (const auto& [key, value] : crit.items()) map[std::stoi(key)] = number_from_json(value);
      p.critical = std::move(map);
      if (!j.contains("taxonomy")) throw data_error("predictor: per-class critical scores need a taxonomy");
    } else {
      p.critical = number_from_json(crit);
    }
    if (j.contains("taxonomy")) p.taxonomy = taxonomy_from_json(j["taxonomy"], p.estimator);
    if (j.contains("calib_sizes")) {
      for (const auto& [key, value] : j["calib_sizes"].items()) p.calib_sizes[std::stoi(key)] = value.get<std::size_t>();
    }
    return p;
  } catch (const json::exception& e) {
    throw data_error(std::string("predictor file: ") + e.what());
  }
}

json to_json(const EvalReport& r) {
  json j{{"alpha", r.alpha},
         {"n_test", r.n_test},
         {"marginal_coverage", r.marginal_coverage},
         {"marginal_width", number_to_json(r.marginal_width)},
         {"n_infinite", r.n_infinite}};
  json classes = json::object();
  for (const auto& [c, cell] : r.per_class) {
    json cj{{"count", cell.count}, {"n_infinite", cell.n_infinite}};
    cj["coverage"] = cell.coverage ? json(*cell.coverage) : json(nullptr);
    cj["width"] = cell.width ? number_to_json(*cell.width) : json(nullptr);
    classes[std::to_string(c)] = std::move(cj);
  }
  j["per_class"] = std::move(classes);
  return j;
}

json to_json(std::span<const MetricSummary> rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"class", r.group},
                   {"metric", r.metric},
                   {"mean", number_to_json(r.mean)},
                   {"std", number_to_json(r.std)},
                   {"n", r.n}});
  }
  return out;
}

json to_json(const BootstrapQuantileReport& r) {
  return {{"class1", r.class1}, {"class2", r.class2}, {"B", r.B},       {"beta", r.beta},
          {"alpha", r.alpha},   {"ci", {number_to_json(r.lower), number_to_json(r.upper)}},
          {"verdict", verdict(r.rejects)}};
}

json to_json(const KsResult& r) { return {{"statistic", r.statistic}, {"p_value", r.p_value}}; }

}  // namespace hetcp
