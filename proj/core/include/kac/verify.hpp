#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kac {

struct CheckResult {
  std::string id;
  std::string name;
  std::string suite;  // module the check belongs to
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  bool quick = false;  // shorter Monte Carlo runs
};

std::vector<std::string> suite_names();

// Empty selector runs everything; otherwise a module name, a check id, or "criteria" for the
// numbered acceptance checks. Throws std::invalid_argument on an unknown selector.
std::vector<CheckResult> run_verify(std::string_view selector, const VerifyOptions& options = {});

std::string format_result(const CheckResult& r);
std::string results_json(const std::vector<CheckResult>& results);

}  // namespace kac
