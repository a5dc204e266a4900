#include <cstdio>
#include <cstdlib>
#include <string>

#include "kac/verify.hpp"

int main(int argc, char** argv) {
  kac::VerifyOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") opt.quick = true;
    else if (a.rfind("--seed=", 0) == 0) opt.seed = std::strtoull(a.c_str() + 7, nullptr, 10);
  }
  int failed = 0;
  const auto results = kac::run_verify("criteria", opt);
  for (const kac::CheckResult& r : results) {
    std::printf("%s\n", kac::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed,
              failed);
  return failed == 0 ? 0 : 1;
}
