#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qmw/config.hpp"

namespace qmw {

/// Suite names accepted by `verify` and `convergence`.
std::vector<std::string> exact_suite_names();
std::vector<std::string> study_suite_names();

/// Expands "all" and group names for a command; throws ConfigError on unknown names.
std::vector<std::string> resolve_suites(const std::vector<std::string>& suites, const std::string& command);

std::vector<CheckResult> run_suites(const RunConfig& config, const std::vector<std::string>& suites);

/// report.json text. `timestamp` and per-check runtimes sit under "run".
std::string report_json(const RunConfig& config, const std::string& command, const std::vector<CheckResult>& checks,
                         const std::string& timestamp);

/// convergence.csv text with header check,M,L,dp,residual,fitted_order.
std::string convergence_csv(const std::vector<CheckResult>& checks);

/// Builds a named operator on the config's instance: N, P<mu>, V<j>, X<j>,
/// Xs<j>, X0, Vt<mu>, U<j>, NWP<j>, Vt<k>_<j>.
FockOperator named_operator(const FockSpace& space, const std::string& name);

/// Dispatches verify / convergence / spectrum / commutator. `operands` holds
/// operator names for spectrum (1) and commutator (2). Returns the exit status.
int run(const RunConfig& config, const std::string& command, const std::vector<std::string>& operands,
        bool write_to_stdout, std::ostream& log);

}  // namespace qmw
