#include "beamspec/nodal.hpp"

#include <algorithm>
#include <cmath>

#include "beamspec/error.hpp"

namespace beamspec {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Root in [0,1] (local coordinate x = (t - t_i)/h) of the parabola through
/// (x0,y0),(x1,y1),(x2,y2); falls back to NaN when none exists.
double parabola_root(double x0, double y0, double x1, double y1, double x2, double y2) {
  // Newton divided differences.
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double c2 = (d12 - d01) / (x2 - x0);
  // p(x) = y0 + d01 (x - x0) + c2 (x - x0)(x - x1) = a x^2 + b x + c
  const double a = c2;
  const double b = d01 - c2 * (x0 + x1);
  const double c = y0 - d01 * x0 + c2 * x0 * x1;
  if (std::abs(a) < 1e-14 * (std::abs(b) + std::abs(c))) {
    return b != 0.0 ? -c / b : std::nan("");
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nan("");
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  const double r1 = q / a;
  const double r2 = q != 0.0 ? c / q : r1;
  auto inside = [](double r) { return r >= -1e-12 && r <= 1.0 + 1e-12; };
  if (inside(r1) && !inside(r2)) return r1;
  if (inside(r2) && !inside(r1)) return r2;
  if (inside(r1) && inside(r2)) return std::abs(r1 - 0.5) < std::abs(r2 - 0.5) ? r1 : r2;
  return std::nan("");
}

double refine_crossing(std::span<const double> v, std::size_t i) {
  // Sign change between nodes i and i+1; local coordinate 0 at node i.
  const double lin = v[i] / (v[i] - v[i + 1]);
  double sum = 0.0;
  int used = 0;
  if (i >= 1) {
    const double r = parabola_root(-1.0, v[i - 1], 0.0, v[i], 1.0, v[i + 1]);
    if (!std::isnan(r)) sum += r, ++used;
  }
  if (i + 2 < v.size()) {
    const double r = parabola_root(0.0, v[i], 1.0, v[i + 1], 2.0, v[i + 2]);
    if (!std::isnan(r)) sum += r, ++used;
  }
  const double x = used > 0 ? sum / used : lin;
  return std::clamp(x, 0.0, 1.0);
}

struct Derivs {
  SampledFn d1, d2, d3;
  double scale;
};

Derivs derivs_of(const SampledFn& u) {
  Derivs d{derivative(u, 1), derivative(u, 2), derivative(u, 3), 0.0};
  d.scale = u.max_abs() + d.d1.max_abs() + d.d2.max_abs() + d.d3.max_abs();
  return d;
}

ZeroRecord classify_with(const Derivs& d, double t_star) {
  if (!(t_star > 0.0 && t_star < 1.0)) {
    throw Error(ErrorKind::OutOfDomain, "zero location must lie in (0,1)");
  }
  ZeroRecord z;
  z.t_star = t_star;
  z.d1 = d.d1.at(t_star);
  z.d2 = d.d2.at(t_star);
  z.d3 = d.d3.at(t_star);
  constexpr double interval_length = 1.0;
  const double worst = std::max({std::abs(z.d1), std::abs(z.d2) * interval_length,
                                 std::abs(z.d3) * interval_length * interval_length});
  z.kind = worst < kDoubleTolerance * d.scale ? ZeroKind::GeneralizedDouble
                                              : ZeroKind::GeneralizedSimple;
  return z;
}

void require_nontrivial(const SampledFn& u) {
  if (!(e_norm(u).value > kTrivialNorm)) {
    throw Error(ErrorKind::TrivialFunction, "function is numerically zero");
  }
}

}  // namespace

std::vector<ZeroCandidate> locate_zeros(const SampledFn& u) {
  require_nontrivial(u);
  const auto v = u.values();
  const std::size_t last = v.size() - 1;  // endpoint index
  const double h = u.grid().h();
  std::vector<ZeroCandidate> out;

  // Sign changes over interior samples; runs of exact zeros are bridged.
  std::size_t prev = 0;  // last interior index with a nonzero sample
  for (std::size_t i = 1; i < last; ++i) {
    if (v[i] == 0.0) continue;
    if (prev != 0 && sign_of(v[i]) != sign_of(v[prev])) {
      if (i == prev + 1) {
        out.push_back({u.grid().node(prev) + h * refine_crossing(v, prev), false});
      } else {
        out.push_back({0.5 * (u.grid().node(prev) + u.grid().node(i)), false});
      }
    }
    prev = i;
  }

  // Touch zeros: near-zero local minima of |u| without a sign change.
  const double thresh = kZeroTolerance * u.max_abs();
  for (std::size_t i = 2; i + 1 < last; ++i) {
    const double a = v[i - 1], b = v[i], c = v[i + 1];
    if (std::abs(b) >= thresh) continue;
    if (std::abs(b) > std::abs(a) || std::abs(b) > std::abs(c)) continue;
    const bool same_side = (b == 0.0) ? sign_of(a) == sign_of(c) && a != 0.0
                                      : sign_of(a) == sign_of(b) && sign_of(c) == sign_of(b);
    if (!same_side) continue;
    const double curv = a - 2.0 * b + c;
    double x = curv != 0.0 ? 0.5 * (a - c) / curv : 0.0;
    x = std::clamp(x, -1.0, 1.0);
    out.push_back({u.grid().node(i) + h * x, true});
  }
  std::sort(out.begin(), out.end(),
            [](const ZeroCandidate& p, const ZeroCandidate& q) { return p.t < q.t; });
  return out;
}

std::vector<double> find_zeros(const SampledFn& u) {
  std::vector<double> t;
  for (const auto& z : locate_zeros(u)) t.push_back(z.t);
  return t;
}

ZeroRecord classify_zero(const SampledFn& u, double t_star) {
  if (!(t_star > 0.0 && t_star < 1.0)) {
    throw Error(ErrorKind::OutOfDomain, "zero location must lie in (0,1)");
  }
  return classify_with(derivs_of(u), t_star);
}

int sign_near_origin(const SampledFn& u) {
  const double floor = 1e-13 * u.max_abs();
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    if (std::abs(u[i]) > floor) return sign_of(u[i]);
  }
  return 0;
}

NodalProfile nodal_profile(const SampledFn& u) {
  const auto candidates = locate_zeros(u);
  const Derivs d = derivs_of(u);
  NodalProfile p;
  p.sigma = sign_near_origin(u);
  for (const auto& c : candidates) {
    ZeroRecord z = classify_with(d, c.t);
    z.touch = c.touch;
    if (c.touch && z.kind == ZeroKind::GeneralizedSimple) {
      p.anomalies.push_back(z);
      continue;
    }
    if (z.kind == ZeroKind::GeneralizedDouble) p.is_nodal = false;
    p.zeros.push_back(z);
  }
  p.count = static_cast<int>(p.zeros.size());
  return p;
}

}  // namespace beamspec
