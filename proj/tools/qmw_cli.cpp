#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qmw/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw qmw::ConfigError("--config: cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moyal-Weyl coordinate operators on a lattice Fock space"};
  app.require_subcommand(1);

  std::string config_path, theta_csv, out_dir, refinements;
  std::vector<std::string> suites;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--suite", suites, "suite name, repeatable")->take_all()->allow_extra_args(false);
  app.add_option("--theta", theta_csv, "theta^{01}, or all d*d entries row-major");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--refinements", refinements, "refinement levels as M:L,M:L,...");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");

  std::vector<std::string> operands;
  auto* verify = app.add_subcommand("verify", "run exact suites and write report.json")->fallthrough();
  auto* convergence =
      app.add_subcommand("convergence", "run convergence studies, write report.json and convergence.csv")
          ->fallthrough();
  auto* spectrum = app.add_subcommand("spectrum", "dump a named operator as row col re im")->fallthrough();
  spectrum->add_option("operator", operands, "operator name")->required()->expected(1);
  auto* commutator = app.add_subcommand("commutator", "dump the deformed commutator of two operators")->fallthrough();
  commutator->add_option("operators", operands, "two operator names")->required()->expected(2);
  (void)verify;
  (void)convergence;

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    qmw::RunConfig cfg = qmw::parse_config(config_path.empty() ? std::string("{}") : read_file(config_path));
    if (!suites.empty()) cfg.suites = suites;
    if (!theta_csv.empty()) cfg.theta = qmw::parse_theta_csv(theta_csv, cfg.lattice.spacetime_dim());
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!refinements.empty()) cfg.refinements = qmw::parse_refinements(refinements);
    if (*seed_opt) cfg.seed = seed;
    qmw::validate(cfg);
    return qmw::run(cfg, command, operands, out_dir.empty(), std::cerr);
  } catch (const qmw::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
