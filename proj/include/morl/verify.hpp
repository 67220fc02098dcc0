#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace morl {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Oracle and property checks, one per acceptance criterion. Each is seeded
// and returns instead of throwing; an unexpected exception is a failure.
CheckResult check_estimator_unbiasedness();    // 1
CheckResult check_is_weight_mean();            // 2
CheckResult check_variance_scaling();          // 3
CheckResult check_gradients();                 // 4
CheckResult check_matched_budget_dst(int parallelism);       // 5
CheckResult check_server_queues_smoke(int parallelism);      // 6
CheckResult check_exponent_pipeline();         // 7
CheckResult check_accounting_determinism();    // 8
CheckResult check_theorem_presets();           // 9

// Runs criteria 1-4 and 7-9, plus 5 and 6 when `full`. Prints one line per
// check to `out` as it finishes.
std::vector<CheckResult> run_checks(bool full, int parallelism, std::ostream& out);

std::string format_check(const CheckResult& r);

}  // namespace morl
