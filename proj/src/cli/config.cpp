#include "hetcp/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace hetcp::cli {

void RunConfig::validate(bool needs_source) const {
  if (needs_source && generator.has_value() == csv_path.has_value()) {
    throw config_error("exactly one data source is required (a generator --type or a --data CSV)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
  if (repetitions < 1) throw config_error("repetitions must be at least 1");
  if (n_test < 1 || n_cal < 1) throw config_error("n_test and n_cal must be positive");
  if (measures.empty()) throw config_error("at least one measure is required");
  if (bootstrap_b < 100) throw config_error("bootstrap B must be at least 100");
  if (!(bootstrap_beta > 0.0 && bootstrap_beta < 1.0)) throw config_error("bootstrap beta must lie in (0, 1)");
  if (!(ks_level > 0.0 && ks_level < 1.0)) throw config_error("ks level must lie in (0, 1)");
  if (quadratic_unit && !(*quadratic_unit > 0.0)) throw config_error("quadratic_unit must be positive");
  if (generator) generator->validate();
  estimator.validate();
  taxonomy.validate();
  split.validate();
  for (const auto& m : measures) m.validate();
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw config_error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T value_of(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig cfg) {
  check_keys(j,
             {"generator", "csv", "estimator", "measures", "epsilon", "alpha", "taxonomy", "mondrian", "repetitions",
              "n_test", "n_cal", "seed", "output_dir", "split", "bootstrap", "ks_level", "quadratic_unit"},
             "config");
  if (j.contains("seed")) cfg.seed = value_of<std::uint64_t>(j, "seed");
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    check_keys(g, {"type", "family", "dim", "n"}, "generator");
    GeneratorSpec spec = cfg.generator.value_or(GeneratorSpec{});
    if (g.contains("type")) spec.type = parse_generator_type(value_of<std::string>(g, "type"));
    if (g.contains("family")) spec.family = parse_family(value_of<std::string>(g, "family"));
    if (g.contains("dim")) spec.dim = value_of<int>(g, "dim");
    if (g.contains("n")) spec.n = value_of<std::size_t>(g, "n");
    cfg.generator = spec;
  }
  if (j.contains("csv")) cfg.csv_path = value_of<std::string>(j, "csv");
  if (j.contains("estimator")) cfg.estimator = estimator_spec_from_json(j["estimator"]);
  const double eps = j.contains("epsilon") ? value_of<double>(j, "epsilon") : 1e-8;
  if (j.contains("measures")) {
    const auto& ms = j["measures"];
    if (!ms.is_array()) throw config_error("config: 'measures' must be an array");
    cfg.measures.clear();
    for (const auto& m : ms) {
      Measure parsed = measure_from_json(m);
      if (m.is_string()) parsed.epsilon = eps;
      cfg.measures.push_back(parsed);
    }
  } else if (j.contains("epsilon")) {
    for (auto& m : cfg.measures) m.epsilon = eps;
  }
  if (j.contains("alpha")) cfg.alpha = value_of<double>(j, "alpha");
  if (j.contains("taxonomy")) cfg.taxonomy = taxonomy_config_from_json(j["taxonomy"]);
  if (j.contains("mondrian")) cfg.mondrian = value_of<bool>(j, "mondrian");
  if (j.contains("repetitions")) cfg.repetitions = value_of<int>(j, "repetitions");
  if (j.contains("n_test")) cfg.n_test = value_of<std::size_t>(j, "n_test");
  if (j.contains("n_cal")) cfg.n_cal = value_of<std::size_t>(j, "n_cal");
  if (j.contains("output_dir")) cfg.output_dir = value_of<std::string>(j, "output_dir");
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_keys(s, {"test_fraction", "calibration_fraction_of_train"}, "split");
    if (s.contains("test_fraction")) cfg.split.test_fraction = value_of<double>(s, "test_fraction");
    if (s.contains("calibration_fraction_of_train")) {
      cfg.split.calibration_fraction_of_train = value_of<double>(s, "calibration_fraction_of_train");
    }
  }
  if (j.contains("bootstrap")) {
    const auto& b = j["bootstrap"];
    check_keys(b, {"B", "beta"}, "bootstrap");
    if (b.contains("B")) cfg.bootstrap_b = value_of<std::size_t>(b, "B");
    if (b.contains("beta")) cfg.bootstrap_beta = value_of<double>(b, "beta");
  }
  if (j.contains("ks_level")) cfg.ks_level = value_of<double>(j, "ks_level");
  if (j.contains("quadratic_unit")) {
    if (j["quadratic_unit"].is_string() && j["quadratic_unit"] == "auto") {
      cfg.quadratic_unit.reset();
    } else {
      cfg.quadratic_unit = value_of<double>(j, "quadratic_unit");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config '" + path + "': " + e.what());
  }
  return config_from_json(j, std::move(base));
}

json to_json(const RunConfig& cfg) {
  json j;
  if (cfg.generator) {
    j["generator"] = {{"type", to_string(cfg.generator->type)},
                      {"family", to_string(cfg.generator->family)},
                      {"dim", cfg.generator->resolved_dim()},
                      {"n", cfg.generator->n}};
  }
  if (cfg.csv_path) j["csv"] = *cfg.csv_path;
  j["estimator"] = hetcp::to_json(cfg.estimator);
  j["measures"] = json::array();
  for (const auto& m : cfg.measures) j["measures"].push_back(hetcp::to_json(m));
  j["alpha"] = cfg.alpha;
  j["taxonomy"] = hetcp::to_json(cfg.taxonomy);
  j["mondrian"] = cfg.mondrian;
  j["repetitions"] = cfg.repetitions;
  j["n_test"] = cfg.n_test;
  j["n_cal"] = cfg.n_cal;
  j["seed"] = cfg.seed;
  j["split"] = {{"test_fraction", cfg.split.test_fraction},
                {"calibration_fraction_of_train", cfg.split.calibration_fraction_of_train}};
  j["bootstrap"] = {{"B", cfg.bootstrap_b}, {"beta", cfg.bootstrap_beta}};
  j["ks_level"] = cfg.ks_level;
  j["quadratic_unit"] = cfg.quadratic_unit ? json(*cfg.quadratic_unit) : json("auto");
  return j;
}

std::string resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("HETCP_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

std::vector<Measure> parse_measure_list(const std::string& csv, double epsilon) {
  std::vector<Measure> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(Measure{parse_measure_kind(item), epsilon});
  }
  if (out.empty()) throw config_error("empty measure list");
  return out;
}

}  // namespace hetcp::cli
