#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmw/verify.hpp"

namespace qmw {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  LatticeSpec lattice{1, 8, 8.0, 0.0};
  int max_particles = 2;
  std::vector<double> theta{0.0, 0.1, -0.1, 0.0};  ///< row-major theta^{mu nu}
  std::vector<std::string> suites{"all"};
  std::vector<std::pair<int, double>> refinements{{8, 8.0}, {16, 16.0}, {32, 32.0}};
  std::uint64_t seed = 42;
  double tol_exact = 1e-12;
  double order_threshold = 0.9;
  std::string output_dir = ".";
  std::size_t memory_budget = kDefaultMemoryBudget;
};

/// theta with theta^{01} = -theta^{10} = value for spacetime dimension d.
std::vector<double> default_theta(int d, double value = 0.1);

/// Parses a JSON object; absent keys take defaults. Errors name the key or
/// field, and JSON syntax errors carry line and column.
RunConfig parse_config(const std::string& text);

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

/// Compact JSON with sorted keys; output_dir is excluded.
std::string canonical_config(const RunConfig& config);

/// 16 hex digits of FNV-1a 64 over canonical_config.
std::string config_hash(const RunConfig& config);

/// "0.1" -> theta^{01} = 0.1; d*d comma-separated values -> full matrix.
std::vector<double> parse_theta_csv(const std::string& csv, int d);

/// "8:8,16:16" -> {(8, 8), (16, 16)}.
std::vector<std::pair<int, double>> parse_refinements(const std::string& text);

InstanceConfig instance_config(const RunConfig& config);
StudyConfig study_config(const RunConfig& config);

}  // namespace qmw
