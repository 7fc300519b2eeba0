#include "qmw/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <regex>
#include <sstream>

#include "json.hpp"

#ifndef QMW_VERSION
#define QMW_VERSION "0.0.0"
#endif

namespace qmw {

using nlohmann::ordered_json;

std::vector<std::string> exact_suite_names() { return {"exact", "controls", "quadrature"}; }

std::vector<std::string> study_suite_names() {
  auto names = convergence_check_names();
  names.push_back("sector_law");
  return names;
}

std::vector<std::string> resolve_suites(const std::vector<std::string>& suites, const std::string& command) {
  const auto exact = exact_suite_names();
  const auto study = study_suite_names();
  std::vector<std::string> out;
  auto add = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& s : suites) {
    if (s == "all") {
      for (const auto& e : command == "convergence" ? study : exact) add(e);
    } else if (s == "convergence") {
      for (const auto& e : convergence_check_names()) add(e);
    } else if (std::find(exact.begin(), exact.end(), s) != exact.end() ||
               std::find(study.begin(), study.end(), s) != study.end()) {
      add(s);
    } else {
      throw ConfigError("unknown suite '" + s + "'");
    }
  }
  return out;
}

std::vector<CheckResult> run_suites(const RunConfig& config, const std::vector<std::string>& suites) {
  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& r : v) out.push_back(std::move(r));
  };
  const InstanceConfig inst = instance_config(config);
  const StudyConfig study = study_config(config);
  for (const auto& s : suites) {
    if (s == "exact") {
      append(check_exact_suite(inst));
    } else if (s == "controls") {
      append(check_negative_controls(inst));
    } else if (s == "quadrature") {
      out.push_back(check_quadrature_guard(1e-3, config.seed));
    } else if (s == "sector_law") {
      out.push_back(check_sector_law(study).check);
    } else {
      out.push_back(run_convergence_check(s, study));
    }
  }
  return out;
}

namespace {

ordered_json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json numbers(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

int parse_index(const std::string& s) {
  if (s.empty() || s.size() > 2 || !std::all_of(s.begin(), s.end(), ::isdigit)) return -1;
  return std::stoi(s);
}

}  // namespace

std::string report_json(const RunConfig& config, const std::string& command, const std::vector<CheckResult>& checks,
                        const std::string& timestamp) {
  ordered_json j;
  j["tool"] = "qmw";
  j["version"] = QMW_VERSION;
  j["command"] = command;
  j["config"] = ordered_json::parse(canonical_config(config));
  j["config_hash"] = config_hash(config);

  ordered_json list = ordered_json::array();
  ordered_json runtimes = ordered_json::object();
  int passed = 0;
  for (const auto& c : checks) {
    ordered_json e;
    e["name"] = c.name;
    e["kind"] = to_string(c.kind);
    e["pass"] = c.pass;
    e["threshold"] = number(c.threshold);
    e["residuals"] = numbers(c.residuals);
    if (c.kind == CheckKind::convergence) {
      ordered_json levels = ordered_json::array();
      for (auto [M, L] : c.levels) levels.push_back({M, L});
      e["levels"] = levels;
      e["spacings"] = numbers(c.spacings);
      e["fitted_order"] = number(c.fitted_order);
    }
    if (!c.series.empty()) {
      ordered_json series = ordered_json::object();
      for (const auto& s : c.series) series[s.name] = numbers(s.values);
      e["series"] = series;
    }
    if (!c.note.empty()) e["note"] = c.note;
    list.push_back(e);
    runtimes[c.name] = c.runtime_ms;
    passed += c.pass ? 1 : 0;
  }
  j["checks"] = list;
  j["summary"] = {{"total", checks.size()}, {"passed", passed}, {"failed", static_cast<int>(checks.size()) - passed}};
  j["run"] = {{"timestamp", timestamp}, {"runtime_ms", runtimes}};
  return j.dump(2) + "\n";
}

std::string convergence_csv(const std::vector<CheckResult>& checks) {
  std::ostringstream s;
  s << "check,M,L,dp,residual,fitted_order\n";
  for (const auto& c : checks) {
    if (c.kind != CheckKind::convergence) continue;
    for (std::size_t i = 0; i < c.residuals.size(); ++i) {
      const auto [M, L] = i < c.levels.size() ? c.levels[i] : std::pair<int, double>{0, 0.0};
      const double dp = i < c.spacings.size() ? c.spacings[i] : std::nan("");
      s << c.name << ',' << M << ',' << fmt(L) << ',' << fmt(dp) << ',' << fmt(c.residuals[i]) << ','
        << fmt(c.fitted_order) << '\n';
    }
  }
  return s.str();
}

FockOperator named_operator(const FockSpace& space, const std::string& name) {
  const int n = space.grid.spec.n;
  auto spatial = [&](const std::string& s) {
    const int j = parse_index(s);
    if (j < 1 || j > n) throw ConfigError("operator '" + name + "': spatial index must be in 1.." + std::to_string(n));
    return j;
  };
  auto any = [&](const std::string& s) {
    const int mu = parse_index(s);
    if (mu < 0 || mu > n) throw ConfigError("operator '" + name + "': index must be in 0.." + std::to_string(n));
    return mu;
  };
  std::smatch m;
  if (name == "N") return number_op(space);
  if (name == "X0") return time_op(space);
  if (std::regex_match(name, m, std::regex("Vt(\\d+)_(\\d+)")))
    return tilde_velocity_commutator(space, spatial(m[1]), spatial(m[2]));
  if (std::regex_match(name, m, std::regex("(P|Vt)(\\d+)")))
    return m[1] == "P" ? momentum_op(space, any(m[2])) : tilde_velocity_op(space, any(m[2]));
  if (std::regex_match(name, m, std::regex("(V|X|Xs|U|NWP)(\\d+)"))) {
    const int j = spatial(m[2]);
    if (m[1] == "V") return velocity_op(space, j);
    if (m[1] == "X") return coordinate_op_spectral(space, j);
    if (m[1] == "Xs") return coordinate_op_stencil(space, j);
    if (m[1] == "U") return unit_position_op(space, j);
    return nwp_op(space, j);
  }
  throw ConfigError("unknown operator '" + name + "' (expected N, P<mu>, V<j>, X<j>, Xs<j>, X0, Vt<mu>, U<j>, NWP<j>, Vt<k>_<j>)");
}

int run(const RunConfig& config, const std::string& command, const std::vector<std::string>& operands,
        bool write_to_stdout, std::ostream& log) {
  const std::filesystem::path out_dir(config.output_dir);
  if (command == "verify" || command == "convergence") {
    const auto suites = resolve_suites(config.suites, command);
    const auto checks = run_suites(config, suites);
    bool ok = !checks.empty();
    for (const auto& c : checks) {
      ok = ok && c.pass;
      log << (c.pass ? "PASS " : "FAIL ") << c.name;
      if (c.kind == CheckKind::convergence) log << "  order " << fmt(c.fitted_order);
      if (!c.residuals.empty()) log << "  residual " << fmt(c.residuals.back());
      log << '\n';
    }
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    write_file(out_dir / "report.json", report_json(config, command, checks, ts.str()));
    if (command == "convergence") write_file(out_dir / "convergence.csv", convergence_csv(checks));
    return ok ? 0 : 1;
  }
  if (command == "spectrum" || command == "commutator") {
    const std::size_t want = command == "spectrum" ? 1 : 2;
    if (operands.size() != want)
      throw ConfigError(command + " expects " + std::to_string(want) + " operator name(s)");
    const FockSpace space = make_fock_space(config.lattice, config.max_particles, config.memory_budget);
    FockOperator op = named_operator(space, operands[0]);
    std::string file = "spectrum_" + operands[0] + ".txt";
    if (command == "commutator") {
      const ThetaMatrix theta(config.lattice.spacetime_dim(), config.theta);
      op = deformed_commutator(op, named_operator(space, operands[1]), theta, space.sectors);
      file = "commutator_" + operands[0] + "_" + operands[1] + ".txt";
    }
    if (write_to_stdout) {
      write_triplets(std::cout, op);
    } else {
      std::ostringstream s;
      write_triplets(s, op);
      write_file(out_dir / file, s.str());
      log << "wrote " << (out_dir / file).string() << '\n';
    }
    return 0;
  }
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace qmw
