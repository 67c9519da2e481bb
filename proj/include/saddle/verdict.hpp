#pragma once

#include <string>
#include <utility>
#include <vector>

namespace saddle {

/// One named check with what was measured and the threshold it was held to.
/// Checks with `counted == false` are reported but do not decide the outcome.
struct Verdict {
  std::string name;
  double measured = 0;
  double tolerance = 0;
  bool pass = false;
  std::string detail;
  bool counted = true;
};

inline Verdict at_most(std::string name, double measured, double tolerance,
                       std::string detail = {}) {
  return Verdict{std::move(name), measured, tolerance, measured <= tolerance, std::move(detail), true};
}

inline bool all_pass(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    if (v.counted && !v.pass) return false;
  }
  return true;
}

}  // namespace saddle
