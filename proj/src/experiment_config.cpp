#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "rshe/error.hpp"
#include "rshe/harness.hpp"
#include "rshe/sigma.hpp"

namespace rshe {

namespace {

const std::set<std::string> kExperiments = {"verify-constants", "sample", "solve",      "qvar",   "lil",
                                            "pvar",             "estimate", "tailbounds", "scaling"};

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range '" + s + "'");
  }
}

int to_int(const std::string& key, const std::string& s) {
  const bool neg = !s.empty() && s[0] == '-';
  const auto v = to_uint(key, neg ? s.substr(1) : s);
  if (v > 1'000'000) throw ConfigError(key + ": integer out of range '" + s + "'");
  return neg ? -static_cast<int>(v) : static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    out.push_back(to_double(key, b == std::string::npos ? "" : item.substr(b, e - b + 1)));
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<nlohmann::json(const ExperimentConfig&)> get;
};

#define RSHE_NUM(sec, name, expr)                                                         \
  Field {                                                                                 \
    sec, name, [](ExperimentConfig& c, const std::string& v) { expr = to_double(name, v); }, \
        [](const ExperimentConfig& c) { return nlohmann::json(expr); }                    \
  }
#define RSHE_UINT(sec, name, expr)                                                       \
  Field {                                                                                \
    sec, name, [](ExperimentConfig& c, const std::string& v) { expr = to_uint(name, v); }, \
        [](const ExperimentConfig& c) { return nlohmann::json(expr); }                   \
  }
#define RSHE_INT(sec, name, expr)                                                       \
  Field {                                                                               \
    sec, name, [](ExperimentConfig& c, const std::string& v) { expr = to_int(name, v); }, \
        [](const ExperimentConfig& c) { return nlohmann::json(expr); }                  \
  }
#define RSHE_BOOL(sec, name, expr)                                                       \
  Field {                                                                                \
    sec, name, [](ExperimentConfig& c, const std::string& v) { expr = to_bool(name, v); }, \
        [](const ExperimentConfig& c) { return nlohmann::json(expr); }                   \
  }
#define RSHE_STR(sec, name, expr)                                           \
  Field {                                                                   \
    sec, name, [](ExperimentConfig& c, const std::string& v) { expr = v; }, \
        [](const ExperimentConfig& c) { return nlohmann::json(expr); }      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      RSHE_STR("experiment", "id", c.experiment),
      RSHE_STR("experiment", "source", c.source),
      RSHE_STR("experiment", "kernel", c.kernel),
      RSHE_STR("experiment", "weight", c.weight),
      RSHE_UINT("experiment", "N", c.N),
      RSHE_INT("experiment", "eps_lo", c.eps_lo),
      RSHE_INT("experiment", "eps_hi", c.eps_hi),
      RSHE_NUM("model", "H", c.model.H),
      RSHE_NUM("model", "theta", c.model.theta),
      RSHE_STR("model", "sigma", c.model.sigma),
      RSHE_STR("model", "u0", c.model.u0),
      RSHE_BOOL("model", "allow_white_noise", c.model.allow_white_noise),
      RSHE_NUM("solver", "L", c.solver.L),
      RSHE_UINT("solver", "n_modes", c.solver.n_modes),
      RSHE_NUM("solver", "dt", c.solver.dt),
      RSHE_NUM("solver", "t_end", c.solver.t_end),
      Field{"solver", "probes",
            [](ExperimentConfig& c, const std::string& v) { c.solver.probes = to_list("probes", v); },
            [](const ExperimentConfig& c) { return nlohmann::json(c.solver.probes); }},
      RSHE_UINT("solver", "record_stride", c.solver.record_stride),
      RSHE_BOOL("solver", "dealias", c.solver.dealias),
      RSHE_BOOL("solver", "store_field", c.solver.store_field),
      RSHE_NUM("solver", "blowup_threshold", c.solver.blowup_threshold),
      RSHE_UINT("mc", "n_paths", c.mc.n_paths),
      RSHE_UINT("mc", "root_seed", c.mc.root_seed),
      RSHE_UINT("mc", "workers", c.mc.workers),
      Field{"output", "dir", [](ExperimentConfig& c, const std::string& v) { c.output.dir = v; },
            [](const ExperimentConfig& c) { return nlohmann::json(c.output.dir.string()); }},
      RSHE_STR("output", "format", c.output.format),
      RSHE_BOOL("output", "write_paths", c.output.write_paths),
      RSHE_NUM("tolerances", "constants_rel", c.tol.constants_rel),
      RSHE_NUM("tolerances", "quadrature_rel", c.tol.quadrature_rel),
      RSHE_NUM("tolerances", "sample_z", c.tol.sample_z),
      RSHE_NUM("tolerances", "qvar_z", c.tol.qvar_z),
      RSHE_NUM("tolerances", "ratio_lo", c.tol.ratio_lo),
      RSHE_NUM("tolerances", "ratio_hi", c.tol.ratio_hi),
      RSHE_NUM("tolerances", "decay_lo", c.tol.decay_lo),
      RSHE_NUM("tolerances", "decay_hi", c.tol.decay_hi),
      RSHE_NUM("tolerances", "cross_rel", c.tol.cross_rel),
      RSHE_NUM("tolerances", "exact_slope_abs", c.tol.exact_slope_abs),
      RSHE_NUM("tolerances", "solver_slope_abs", c.tol.solver_slope_abs),
      RSHE_NUM("tolerances", "lil_lo", c.tol.lil_lo),
      RSHE_NUM("tolerances", "lil_hi", c.tol.lil_hi),
      RSHE_NUM("tolerances", "lil_fraction", c.tol.lil_fraction),
      RSHE_NUM("tolerances", "chung_stability", c.tol.chung_stability),
      RSHE_NUM("tolerances", "pvar_rel", c.tol.pvar_rel),
      RSHE_NUM("tolerances", "theta_rel", c.tol.theta_rel),
      RSHE_NUM("tolerances", "hurst_abs", c.tol.hurst_abs),
      RSHE_NUM("tolerances", "abort_fraction", c.tol.abort_fraction),
  };
  return table;
}

#undef RSHE_NUM
#undef RSHE_UINT
#undef RSHE_INT
#undef RSHE_BOOL
#undef RSHE_STR

// Keys that do not influence any artifact.
bool omitted_from_manifest(const Field& f) { return f.section == "mc" && f.key == "workers"; }

std::string json_scalar_to_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_scalar_to_string(v[i]);
    return s;
  }
  if (v.is_number()) return v.dump();
  throw ConfigError("unsupported value in manifest: " + v.dump());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kExperiments.count(experiment)) throw ConfigError("unknown experiment '" + experiment + "'");
  model.validate();
  if (source != "exact" && source != "solver") throw ConfigError("source must be exact or solver");
  if (kernel != "linear_she" && kernel != "T" && kernel != "fbm") throw ConfigError("kernel must be linear_she, T or fbm");
  if (weight != "one" && weight != "identity" && weight != "tanh") throw ConfigError("weight must be one, identity or tanh");
  if (N < 2 || N > 8192) throw ConfigError("N must be in [2, 8192]");
  if (mc.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  if (mc.workers < 1) throw ConfigError("workers must be >= 1");
  if (output.format != "csv" && output.format != "json") throw ConfigError("format must be csv or json");
  if (eps_lo < 1 || eps_hi < eps_lo || eps_hi > 26) throw ConfigError("need 1 <= eps_lo <= eps_hi <= 26");
  if (!(tol.ratio_lo < tol.ratio_hi) || !(tol.decay_lo < tol.decay_hi) || !(tol.lil_lo < tol.lil_hi))
    throw ConfigError("tolerance bands must be ordered");
  const bool uses_solver = experiment == "solve" || (source == "solver" && (experiment == "qvar" || experiment == "scaling"));
  if (uses_solver) {
    SolverConfig s = solver;
    s.params = model;
    s.validate();
  }
  if ((experiment == "pvar" || experiment == "lil" || experiment == "estimate" || experiment == "qvar") && (N & (N - 1)) != 0)
    throw ConfigError("N must be a power of two for " + experiment);
}

nlohmann::json ExperimentConfig::manifest() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : fields()) {
    if (omitted_from_manifest(f)) continue;
    j[f.section][f.key] = f.get(*this);
  }
  j["output"].erase("dir");
  return j;
}

ConfigTree read_config_tree(const std::filesystem::path& file) {
  ConfigTree tree;
  if (file.extension() == ".json") {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config " + file.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
    for (const auto& [section, body] : j.items()) {
      if (!body.is_object()) throw ConfigError("manifest section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) tree[section][key] = json_scalar_to_string(value);
    }
    return tree;
  }
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(file.string(), pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& [section, body] : pt) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) tree[section][key] = value.get_value<std::string>();
  }
  return tree;
}

void apply_config_tree(ExperimentConfig& cfg, const ConfigTree& tree) {
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      bool found = false;
      for (const auto& f : fields()) {
        if (f.section == section && f.key == key) {
          f.set(cfg, value);
          found = true;
          break;
        }
      }
      if (!found) throw ConfigError("unknown config key [" + section + "] " + key);
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  ExperimentConfig cfg;
  cfg.output.dir = default_output_dir();
  apply_config_tree(cfg, read_config_tree(file));
  return cfg;
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("RSHE_OUT_DIR"); env && *env) return env;
  return "rshe_out";
}

}  // namespace rshe
