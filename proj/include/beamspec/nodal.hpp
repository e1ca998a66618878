#pragma once

#include <vector>

#include "beamspec/grid.hpp"

namespace beamspec {

enum class ZeroKind { GeneralizedSimple, GeneralizedDouble };

struct ZeroRecord {
  double t_star = 0.0;
  ZeroKind kind = ZeroKind::GeneralizedSimple;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;  // u', u'', u''' at t_star
  bool touch = false;                   // no sign change across t_star
};

struct NodalProfile {
  int count = 0;
  int sigma = 0;  // sign of u just right of t = 0; 0 if undefined
  std::vector<ZeroRecord> zeros;
  bool is_nodal = true;
  /// Touch zeros classified simple: impossible for nontrivial solutions, kept for diagnosis.
  std::vector<ZeroRecord> anomalies;
};

inline constexpr double kTrivialNorm = 1e-12;
inline constexpr double kZeroTolerance = 1e-6;    // touch-zero candidate, relative to max|u|
inline constexpr double kDoubleTolerance = 1e-6;  // relative to e_norm

struct ZeroCandidate {
  double t = 0.0;
  bool touch = false;
};

/// Sign changes between consecutive interior samples (refined by quadratic
/// interpolation) plus touch-zero candidates. Endpoints are never reported.
std::vector<ZeroCandidate> locate_zeros(const SampledFn& u);
/// Locations only, in increasing order.
std::vector<double> find_zeros(const SampledFn& u);

ZeroRecord classify_zero(const SampledFn& u, double t_star);

NodalProfile nodal_profile(const SampledFn& u);

/// Sign of u at the first interior node that is not numerically zero.
int sign_near_origin(const SampledFn& u);

}  // namespace beamspec
