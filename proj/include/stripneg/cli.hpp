#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stripneg/config.hpp"
#include "stripneg/report.hpp"

namespace stripneg {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_unsatisfied = 3 };

/// Worker count from STRIPNEG_WORKERS (default 1; 0 means hardware concurrency).
unsigned workers_from_environment();

/// Each returns the report and sets `unsatisfied` when some row fails its
/// inequality (error rows do not count).
Report run_bound(const RunConfig& config);
Report run_count(const RunConfig& config, unsigned workers);
Report run_audit(const RunConfig& config, unsigned workers, bool sorted_by_phi, bool& unsatisfied);
Report run_inequalities(const RunConfig& config, unsigned workers, bool& unsatisfied);

/// Full command line (args[0] is the program name). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stripneg
