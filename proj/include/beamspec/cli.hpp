#pragma once

#include <string>
#include <vector>

#include "beamspec/continuation.hpp"
#include "beamspec/error.hpp"

namespace beamspec {

inline constexpr const char* kVersion = "0.1.0";

/// 1 usage, 2 hypothesis or validation failure, 3 numerical failure.
int exit_code_for(ErrorKind kind);

/// args excludes the program name. Writes outputs plus manifest.json under --out.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

struct LabeledBranch {
  std::string problem;  // "cubic" or "saturating"
  double gamma = 0.0;   // autonomous problems only
  Branch branch;
};

/// The fixed branch set of verify-all on m = 1: cubic g = s^3 and saturating
/// f = s(2 - 1/(1+s^2)) at gamma = 0.75 mu_k, each for k = 1, 2 and sigma = +, -.
std::vector<LabeledBranch> verify_all_branches(int n_interior, const ContinuationConfig& config);

}  // namespace beamspec
