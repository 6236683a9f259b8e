#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "preqmc/experiment.hpp"

namespace preqmc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Experiment-backed checks (the report must come from the default
// configuration: d = 256, N in {2^12, 2^14, 2^16}, R = 10, all methods).
CheckResult check_convergence_rates(const ConvergenceReport& report);
CheckResult check_error_ordering(const ConvergenceReport& report);

// Self-contained checks.
CheckResult check_one_dim_exactness();
CheckResult check_anova_identities();
CheckResult check_factorizations();
CheckResult check_root_finder();
CheckResult check_derivative_probes();
CheckResult check_boundary_fixture();
CheckResult check_sampler();

// The cheap invariant suite used by the CLI: factorizations, root finder,
// derivative probes, boundary fixture, sampler.
std::vector<CheckResult> run_invariant_checks();

// One "PASS name: detail" / "FAIL name: detail" line each; returns the
// number of failures.
int print_check_lines(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace preqmc
