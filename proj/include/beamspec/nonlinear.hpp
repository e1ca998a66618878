#pragma once

#include <functional>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "beamspec/banded.hpp"
#include "beamspec/grid.hpp"

namespace beamspec {

/// g(t, s, mu) in u'''' = mu m u + g(t, u, mu). Partials are optional;
/// missing ones are replaced by central differences.
struct PerturbationG {
  std::string name;
  std::function<double(double, double, double)> evaluate;
  std::function<double(double, double, double)> d_s;
  std::function<double(double, double, double)> d_mu;
};

/// f in u'''' = gamma m f(u), with declared limits f(s)/s -> f0 (s -> 0) and -> finf (|s| -> inf).
struct AsymptoticF {
  std::string name;
  std::function<double(double)> f;
  double f0 = 1.0;
  double finf = 1.0;
  std::function<double(double)> derivative;
};

struct Perturbed {
  PerturbationG g;
};

struct Autonomous {
  double gamma = 1.0;
  AsymptoticF f;
};

struct ProblemSpec {
  SampledFn m;
  std::variant<Perturbed, Autonomous> kind;

  const Grid& grid() const noexcept { return m.grid(); }
  bool autonomous() const noexcept { return std::holds_alternative<Autonomous>(kind); }
};

using Params = std::map<std::string, double>;

// Registry. Perturbations: "none", "cubic" (c s^3, param c = 1).
PerturbationG builtin_perturbation(const std::string& name, const Params& params = {});
std::vector<std::string> builtin_perturbation_names();
/// g = pi^4 sin(pi t) - mu m(t) s, so that sin(pi t) solves the perturbed problem for every mu.
PerturbationG manufactured_perturbation(std::function<double(double)> m);
/// g = mu (f(s) - f0 s): the perturbed form of u'''' = mu m f(u) linearized at zero.
PerturbationG reduction_perturbation(const AsymptoticF& f);

// Asymptotically linear f: "linear", "saturating" s (finf - (finf - f0)/(1 + s^2)),
// "atan" finf s + (f0 - finf) atan(s), "gaussian" s exp(-s^2) (violates finf > 0).
// Params f0 and finf default to 1 and 2.
AsymptoticF builtin_asymptotic(const std::string& name, const Params& params = {});
std::vector<std::string> builtin_asymptotic_names();
/// Piecewise-linear f through (s_i, f_i); the table must contain (0, 0).
/// Outside the table f(s)/s is held at its end value, which defines finf.
AsymptoticF tabulated_asymptotic(std::string name, std::vector<double> s, std::vector<double> fs);
/// Two-column CSV "s,f" (header optional).
AsymptoticF read_asymptotic_csv(std::istream& in, std::string name = "table");

/// Nonlinear right-hand side N(u, mu) at interior nodes and its partials:
///   Perturbed:  N = mu m u + g(t, u, mu)
///   Autonomous: N = mu gamma m f(u)
struct Linearization {
  std::vector<double> value;
  std::vector<double> d_s;
  std::vector<double> d_mu;
};
Linearization linearize(const ProblemSpec& spec, const SampledFn& u, double mu);
std::vector<double> nonlinear_term(const ProblemSpec& spec, const SampledFn& u, double mu);

/// Boundary tolerances relative to e_norm(u): |u| at the ends <= 1e-10,
/// |u''| at the ends <= 1e2 h^2 (one-sided stencil truncation).
void check_boundary(const SampledFn& u);

struct ResidualReport {
  double max_norm = 0.0;  // max |fixed_point|
  SampledFn fixed_point;  // u - Lambda^2 N(u, mu)
  SampledFn strong;       // K u - N(u, mu)
  double strong_max = 0.0;
};
ResidualReport residual(const SampledFn& u, double mu, const ProblemSpec& spec);

struct SmallOReport {
  std::vector<double> s_values;  // 1e-1 .. 1e-6
  std::vector<double> ratios;    // max |g| / |s|
  bool passes = false;
};
SmallOReport check_small_o(const PerturbationG& g, double mu_lo, double mu_hi);

struct AsymptoticsReport {
  double f0_hat = 0.0;
  double finf_hat = 0.0;
  bool h1_ok = false;
};
/// Throws AsymptoticMismatch when the declared limits differ from the estimates
/// by more than 1e-3 relative, or when the estimates are not positive.
AsymptoticsReport check_asymptotics(const AsymptoticF& f);
/// Estimates only, never throws.
AsymptoticsReport estimate_asymptotics(const AsymptoticF& f);

/// Factored Jacobian of G(u) = u - Lambda^2 N(u) with respect to u,
/// G_u = I - Lambda^2 D with D = diag(dN/ds). Solves go through the banded LU of K - D.
class FixedPointJacobian {
 public:
  FixedPointJacobian(const Grid& grid, std::vector<double> d);

  /// Overwrites the interior vector b with G_u^{-1} b.
  void solve(std::span<double> b) const;
  /// Overwrites b with (K - D)^{-1} b.
  void solve_shifted(std::span<double> b) const { lu_.solve(b); }
  /// G_u x for an interior vector.
  std::vector<double> apply(std::span<const double> x) const;
  /// Inverse-iteration estimate of the smallest singular value of G_u.
  double smallest_singular(int iterations = 4) const;
  /// Below this the estimate is indistinguishable from zero: max(1e-10, 4 eps ||K|| / max|D|).
  double singular_floor() const;

 private:
  Grid grid_;
  std::vector<double> d_;
  BandedLU lu_;
};

struct NewtonResult {
  SampledFn u;
  int iterations = 0;
  std::vector<double> history;  // residual max_norm before each step, then the final one
};

inline constexpr int kNewtonMaxIterations = 50;
inline constexpr double kSingularThreshold = 1e-10;

/// Damped Newton on G(u) = 0 with Armijo halving down to 2^-16.
/// tol <= 0 selects 1e-10 (1 + e_norm(u0)).
NewtonResult newton_solve(const SampledFn& u0, double mu, const ProblemSpec& spec, double tol = -1.0);
SampledFn newton(const SampledFn& u0, double mu, const ProblemSpec& spec, double tol = -1.0);

}  // namespace beamspec
