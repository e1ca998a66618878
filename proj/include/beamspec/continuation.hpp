#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "beamspec/grid.hpp"
#include "beamspec/nodal.hpp"
#include "beamspec/nonlinear.hpp"
#include "beamspec/spectrum.hpp"

namespace beamspec {

struct ContinuationConfig {
  double ds = 0.05;
  double ds_min = 1e-5;
  double ds_max = 0.5;
  double eps_start = 1e-3;
  double corrector_tol = 1e-10;  // on max|G| relative to max|u|
  int max_steps = 2000;
  double norm_budget = 1e3;

  /// Throws Usage unless 0 < ds_min <= ds <= ds_max and the rest are positive.
  void validate() const;
};

enum class Termination { NormBudget, StepFailure, HyperplaneGoal, MaxSteps, Falsification };
std::string to_string(Termination t);

struct BranchPoint {
  double mu = 0.0;
  SampledFn u;
  ENorm norm;
  NodalProfile profile;
  double arclength = 0.0;
  int newton_iterations = 0;
};

/// Start of the half-branch (C_k^nu)^sigma next to (mu_b, 0).
struct BranchStart {
  int k = 1;
  int nu = +1;
  int sigma = +1;
  double origin_mu = 0.0;       // bifurcation value of the continuation parameter
  double eps = 0.0;             // amplitude actually used
  SampledFn phi;                // eigenfunction, e_norm 1, positive near 0
  std::vector<double> others;   // remaining bifurcation values, for falsification checks
  BranchPoint point;
};

struct Branch {
  int k = 1;
  int nu = +1;
  int sigma = +1;
  double origin_mu = 0.0;
  double eps = 0.0;
  std::vector<BranchPoint> points;
  Termination termination = Termination::NormBudget;
  std::string diagnostic;
  int rejected_profile_changes = 0;  // trial points whose (count, sigma) differed
  int rejected_double_zeros = 0;     // trial points carrying a generalized double zero
};

/// Bifurcation value of the continuation parameter for eigenvalue mu_k:
/// mu_k itself for Perturbed specs, mu_k / (gamma f0) for Autonomous ones.
double bifurcation_value(const ProblemSpec& spec, double mu_k);

BranchStart bifurcation_start(int k, int nu, int sigma, const ProblemSpec& spec,
                              const ContinuationConfig& config);
BranchStart bifurcation_start(int k, int nu, int sigma, const ProblemSpec& spec,
                              const ContinuationConfig& config, const SpectrumResult& spectrum);

/// Called after each accepted point with (previous, current); returning true stops the trace.
using BranchGoal = std::function<bool(const BranchPoint&, const BranchPoint&)>;

Branch trace_branch(const BranchStart& start, const ProblemSpec& spec, const ContinuationConfig& config,
                    const BranchGoal& goal = {});

/// Solution at mu = 1 on a branch that brackets it. relative_tol scales max|u|.
SampledFn cross_hyperplane(const Branch& branch, const ProblemSpec& spec, double relative_tol = 1e-10);

/// Admissible gamma interval of the single-branch result for (k, nu), open, possibly empty.
struct GammaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  bool contains(double g) const { return lo < g && g < hi; }
};
GammaInterval admissible_gamma(double mu_k, double f0, double finf);
/// Range version for j = k..n: the two displayed orientations, each possibly empty.
std::vector<GammaInterval> admissible_gamma_range(double mu_k, double mu_n, double f0, double finf);

struct NodalSolution {
  int k = 1;
  int nu = +1;
  int sigma = +1;
  SampledFn u;
  NodalProfile profile;
  double residual = 0.0;
  Branch branch;
};

NodalSolution solve_nodal(double gamma, const AsymptoticF& f, const SampledFn& m, int k, int nu, int sigma,
                          const ContinuationConfig& config);

struct NodalRange {
  std::vector<NodalSolution> solutions;  // j = k..n, sigma = +, - for each
  std::string notice;                    // set when the admissible set is empty
  bool skipped = false;
};
/// Multi-index driver; with an empty admissible set it returns skipped = true and a notice
/// instead of throwing, so callers can report the case explicitly.
NodalRange solve_nodal_range(double gamma, const AsymptoticF& f, const SampledFn& m, int k, int n, int nu,
                             const ContinuationConfig& config);

/// Smallest e_norm(u_a - u_b) over points of a paired with the point of b nearest in mu.
double min_separation(const Branch& a, const Branch& b);

}  // namespace beamspec
