#include "qmw/config.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qmw {

using nlohmann::json;

std::vector<double> default_theta(int d, double value) {
  std::vector<double> t(static_cast<std::size_t>(d * d), 0.0);
  t[1] = value;
  t[static_cast<std::size_t>(d)] = -value;
  return t;
}

namespace {

const std::set<std::string> kKeys{"n",    "M",    "L",        "m",         "N_max",     "theta",           "suites",
                                  "refinements", "seed", "tol_exact", "order_threshold", "output_dir", "memory_budget_bytes"};

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

int int_field(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("config: field '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

double number_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("config: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::vector<double> theta_field(const json& j, int d) {
  if (!j.contains("theta")) return default_theta(d);
  const json& t = j.at("theta");
  std::vector<double> flat;
  if (!t.is_array()) throw ConfigError("config: field 'theta' must be an array");
  for (const auto& row : t) {
    if (row.is_array()) {
      for (const auto& v : row) {
        if (!v.is_number()) throw ConfigError("config: field 'theta' must contain numbers");
        flat.push_back(v.get<double>());
      }
    } else if (row.is_number()) {
      flat.push_back(row.get<double>());
    } else {
      throw ConfigError("config: field 'theta' must contain numbers");
    }
  }
  return flat;
}

std::vector<std::pair<int, double>> refinement_field(const json& j) {
  std::vector<std::pair<int, double>> out;
  const json& r = j.at("refinements");
  if (!r.is_array()) throw ConfigError("config: field 'refinements' must be an array of [M, L] pairs");
  for (const auto& level : r) {
    if (!level.is_array() || level.size() != 2 || !level[0].is_number_integer() || !level[1].is_number())
      throw ConfigError("config: field 'refinements' must be an array of [M, L] pairs");
    out.emplace_back(level[0].get<int>(), level[1].get<double>());
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text.empty() ? std::string("{}") : text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("config: JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKeys.contains(key)) throw ConfigError("config: unknown key '" + key + "'");

  RunConfig c;
  c.lattice.n = int_field(j, "n", c.lattice.n);
  c.lattice.M = int_field(j, "M", c.lattice.M);
  c.lattice.L = number_field(j, "L", c.lattice.L);
  c.lattice.m = number_field(j, "m", c.lattice.m);
  c.max_particles = int_field(j, "N_max", c.max_particles);
  c.theta = theta_field(j, c.lattice.spacetime_dim());
  if (j.contains("suites")) {
    c.suites = field<std::vector<std::string>>(j, "suites", c.suites);
    if (c.suites.empty()) throw ConfigError("config: field 'suites' must not be empty");
  }
  if (j.contains("refinements")) c.refinements = refinement_field(j);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config: field 'seed' must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.tol_exact = number_field(j, "tol_exact", c.tol_exact);
  c.order_threshold = number_field(j, "order_threshold", c.order_threshold);
  c.output_dir = field<std::string>(j, "output_dir", c.output_dir);
  if (j.contains("memory_budget_bytes")) {
    if (!j.at("memory_budget_bytes").is_number_unsigned())
      throw ConfigError("config: field 'memory_budget_bytes' must be a nonnegative integer");
    c.memory_budget = j.at("memory_budget_bytes").get<std::size_t>();
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  try {
    validate(c.lattice);
  } catch (const LatticeError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.max_particles < 1) throw ConfigError("config: field 'N_max' must be >= 1");
  const int d = c.lattice.spacetime_dim();
  if (c.theta.size() != static_cast<std::size_t>(d * d))
    throw ConfigError("config: field 'theta' needs " + std::to_string(d * d) + " entries for n = " +
                      std::to_string(c.lattice.n));
  try {
    ThetaMatrix(d, c.theta);
  } catch (const ThetaError& e) {
    throw ConfigError(std::string("config: field 'theta': ") + e.what());
  }
  if (c.refinements.empty()) throw ConfigError("config: field 'refinements' must not be empty");
  for (std::size_t i = 0; i < c.refinements.size(); ++i) {
    const auto [M, L] = c.refinements[i];
    if (M < 4 || M % 2 != 0 || !(L > 0))
      throw ConfigError("config: field 'refinements' level " + std::to_string(i) + " needs even M >= 4 and L > 0");
    if (i > 0 && M <= c.refinements[i - 1].first)
      throw ConfigError("config: field 'refinements' must be strictly increasing in M");
  }
  if (!(c.tol_exact > 0)) throw ConfigError("config: field 'tol_exact' must be positive");
  if (!(c.order_threshold > 0)) throw ConfigError("config: field 'order_threshold' must be positive");
  if (c.memory_budget == 0) throw ConfigError("config: field 'memory_budget_bytes' must be positive");
}

std::string canonical_config(const RunConfig& c) {
  json j;
  j["n"] = c.lattice.n;
  j["M"] = c.lattice.M;
  j["L"] = c.lattice.L;
  j["m"] = c.lattice.m;
  j["N_max"] = c.max_particles;
  j["theta"] = c.theta;
  j["suites"] = c.suites;
  json levels = json::array();
  for (auto [M, L] : c.refinements) levels.push_back({M, L});
  j["refinements"] = levels;
  j["seed"] = c.seed;
  j["tol_exact"] = c.tol_exact;
  j["order_threshold"] = c.order_threshold;
  j["memory_budget_bytes"] = c.memory_budget;
  return j.dump();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> parse_theta_csv(const std::string& csv, int d) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--theta: cannot parse '" + item + "' as a number");
    }
  }
  if (v.size() == 1) return default_theta(d, v[0]);
  if (v.size() != static_cast<std::size_t>(d * d))
    throw ConfigError("--theta: expected 1 or " + std::to_string(d * d) + " values, got " + std::to_string(v.size()));
  return v;
}

std::vector<std::pair<int, double>> parse_refinements(const std::string& text) {
  std::vector<std::pair<int, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("--refinements: expected M:L, got '" + item + "'");
    try {
      out.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("--refinements: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--refinements: no levels given");
  return out;
}

InstanceConfig instance_config(const RunConfig& c) {
  InstanceConfig i;
  i.lattice = c.lattice;
  i.max_particles = c.max_particles;
  i.theta = c.theta;
  i.seed = c.seed;
  i.tol_exact = c.tol_exact;
  i.memory_budget = c.memory_budget;
  return i;
}

StudyConfig study_config(const RunConfig& c) {
  StudyConfig s;
  s.n = c.lattice.n;
  s.m = c.lattice.m;
  s.max_particles = c.max_particles;
  s.refinements = c.refinements;
  s.theta = c.theta;
  s.seed = c.seed;
  s.order_threshold = c.order_threshold;
  s.memory_budget = c.memory_budget;
  return s;
}

}  // namespace qmw
