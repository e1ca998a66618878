#pragma once

#include <functional>
#include <string>
#include <vector>

#include "beamspec/grid.hpp"

namespace beamspec {

/// A weight m(t) on [0,1] known as a callable, with a stable identifier.
struct Weight {
  std::string id;
  std::function<double(double)> eval;

  SampledFn sample(const Grid& grid) const { return SampledFn::sample(grid, eval); }
};

/// Builtins: "one" (m = 1), "sin3pi" (sin 3 pi t), "cos2pi" (cos 2 pi t),
/// "linear_ramp" (1 - 2t). Throws Usage for unknown names.
Weight builtin_weight(const std::string& name);
std::vector<std::string> builtin_weight_names();

/// Weight from (t, m) samples on any increasing node set covering [0,1];
/// evaluated by piecewise-linear interpolation.
Weight tabulated_weight(std::string id, std::vector<double> t, std::vector<double> values);

}  // namespace beamspec
