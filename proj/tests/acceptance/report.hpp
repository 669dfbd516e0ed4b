#pragma once

#include <chrono>
#include <cstdio>
#include <string>

namespace acceptance {

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Prints the single result line of a criterion and returns the exit code.
inline int report(int criterion, bool ok, const std::string& detail, const Clock& clock) {
  std::printf("criterion %d: %s (%s; %.2f s)\n", criterion, ok ? "PASS" : "FAIL", detail.c_str(),
              clock.seconds());
  return ok ? 0 : 1;
}

/// Soft criteria never fail the run.
inline int report_soft(int criterion, bool ok, const std::string& detail, const Clock& clock) {
  std::printf("criterion %d: %s (%s; %.2f s)\n", criterion, ok ? "PASS" : "WARN", detail.c_str(),
              clock.seconds());
  return 0;
}

}  // namespace acceptance
