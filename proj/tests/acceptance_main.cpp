// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria 1 and 2 share one full default-configuration experiment.
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "preqmc/checks.hpp"

using preqmc::CheckResult;

namespace {

CheckResult guarded(const std::string& name,
                    const std::function<CheckResult()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  std::vector<CheckResult> results;

  preqmc::ConvergenceReport report;
  bool have_report = false;
  try {
    preqmc::ExperimentConfig cfg;  // defaults: d=256, R=10, N=2^12..2^16, pca
    report = preqmc::run_experiment(cfg);
    have_report = true;
  } catch (const std::exception& e) {
    const std::string why = std::string("experiment failed: ") + e.what();
    results.push_back({"convergence-rates", false, why});
    results.push_back({"error-ordering", false, why});
  }
  if (have_report) {
    results.push_back(guarded("convergence-rates", [&] {
      return preqmc::check_convergence_rates(report);
    }));
    results.push_back(guarded("error-ordering", [&] {
      return preqmc::check_error_ordering(report);
    }));
  }
  results.push_back(guarded("one-dim-exactness", preqmc::check_one_dim_exactness));
  results.push_back(guarded("anova-identities", preqmc::check_anova_identities));
  results.push_back(guarded("factorizations", preqmc::check_factorizations));
  results.push_back(guarded("root-finder", preqmc::check_root_finder));
  results.push_back(guarded("derivative-probes", preqmc::check_derivative_probes));
  results.push_back(guarded("boundary-fixture", preqmc::check_boundary_fixture));
  results.push_back(guarded("sampler", preqmc::check_sampler));

  const int failures = preqmc::print_check_lines(std::cout, results);
  if (failures == 0)
    std::cout << "all 9 criteria passed\n";
  else
    std::cout << failures << " of 9 criteria failed\n";
  return failures == 0 ? 0 : 1;
}
