#pragma once

#include <string>
#include <vector>

namespace hmod {

// One verdict: a certified lower bound of the left side against a certified
// upper bound of the right side, with the slack that was granted.
struct CheckRow {
  std::string name;
  double lhs_lower = 0.0;
  double rhs_upper = 0.0;
  double slack = 0.0;
  bool pass = false;
};

inline CheckRow make_check(std::string name, double lhs, double rhs, double slack = 0.0) {
  return {std::move(name), lhs, rhs, slack, lhs <= rhs + slack};
}

using Report = std::vector<CheckRow>;

}  // namespace hmod
