#pragma once

#include <string>
#include <vector>

#include "col/bifunction.hpp"

namespace col::harness {

struct CheckItem {
  std::string name;
  bool holds = true;
  double margin = 0.0;  // worst slack; negative means violated
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckItem> items;
  bool passed() const;
  std::string render() const;
};

std::vector<std::string> suite_names();

/// Runs a named property suite with fixed seeds. Throws InvalidArgument
/// listing the available suites for an unknown name.
SuiteReport check_suite(const std::string& name);

/// Quadratic tracking with alpha = 2, lambda = 0.5, c = 0 on [-1, 1]^d.
Bifunction reference_tracking(Index d);

/// 3 states, 2 actions, horizon 5, seeded MDP and expert, mu = 1.
/// `grouped` ties the parameters of states 0 and 1.
Bifunction reference_imitation(bool grouped);

/// F(x) = M x + q with a nonzero symmetric part on [-1, 1]^2.
Bifunction reference_linear_vi();

}  // namespace col::harness
