#include "beamspec/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "beamspec/error.hpp"
#include "beamspec/linops.hpp"

namespace beamspec {

namespace {

using Vec = std::vector<double>;
using Functional = std::function<double(std::span<const double>)>;

constexpr int kCorrectorMaxIterations = 12;
constexpr int kStartHalvings = 8;
constexpr int kRefinementSteps = 2;

double sup(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

Vec second_diff(std::span<const double> x, double h) {
  Vec a(x.begin(), x.end());
  second_diff_inplace(a, h);
  return a;
}

/// Continuation metric mu mu' + h sum (A u)(A u').
double metric(double mu_a, std::span<const double> ua, double mu_b, std::span<const double> ub, double h) {
  const Vec aa = second_diff(ua, h);
  const Vec ab = second_diff(ub, h);
  double s = 0.0;
  for (std::size_t i = 0; i < aa.size(); ++i) s += aa[i] * ab[i];
  return mu_a * mu_b + h * s;
}

struct Tangent {
  double mu = 0.0;
  Vec u;
  Vec au;  // A u, cached for the constraint functional
};

Tangent normalized_tangent(double dmu, Vec du, double h) {
  const double nrm = std::sqrt(metric(dmu, du, dmu, du, h));
  Tangent t;
  t.mu = dmu / nrm;
  for (double& x : du) x /= nrm;
  t.u = std::move(du);
  t.au = second_diff(t.u, h);
  return t;
}

/// Bordered system
///   G_u du - Lambda^2 N_mu dmu = r1
///   c_u(du) + c_mu dmu         = r2
/// by block elimination with iterative refinement on accurately formed residuals.
struct BorderedSolver {
  const FixedPointJacobian& jac;
  Vec l2n;  // Lambda^2 N_mu
  Vec b;    // G_u^{-1} Lambda^2 N_mu
  const Functional& cu;
  double cmu;
  double denom;
  double h;

  BorderedSolver(const FixedPointJacobian& j, const Vec& n_mu, const Functional& c_u, double c_mu, double hh)
      : jac(j), l2n(n_mu), b(n_mu), cu(c_u), cmu(c_mu), denom(0.0), h(hh) {
    lambda_solve_inplace(l2n, h);
    lambda_solve_inplace(l2n, h);
    jac.solve_shifted(b);  // (K - D) b = N_mu  <=>  G_u b = Lambda^2 N_mu
    denom = cmu + cu(b);
  }

  void once(Vec& a, double r2, double& dmu) const {
    jac.solve(a);
    dmu = (r2 - cu(a)) / denom;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += dmu * b[i];
  }

  void solve(const Vec& r1, double r2, Vec& du, double& dmu) const {
    du = r1;
    once(du, r2, dmu);
    for (int it = 0; it < kRefinementSteps; ++it) {
      Vec e1 = jac.apply(du);
      for (std::size_t i = 0; i < e1.size(); ++i) e1[i] = r1[i] - (e1[i] - l2n[i] * dmu);
      const double e2 = r2 - (cu(du) + cmu * dmu);
      double ddmu = 0.0;
      once(e1, e2, ddmu);
      for (std::size_t i = 0; i < du.size(); ++i) du[i] += e1[i];
      dmu += ddmu;
    }
  }
};

struct Corrected {
  bool ok = false;
  int iterations = 0;
};

/// Newton on [G(u, mu); c(u, mu)] = 0 with c linear: c(u, mu) = cu(u) + cmu mu - target.
/// Stops when max|G| <= tol max|u|, then takes one polishing step.
Corrected correct(SampledFn& u, double& mu, const ProblemSpec& spec, const Functional& cu, double cmu,
                  double target, double tol) {
  const double h = spec.grid().h();
  Corrected out;
  bool polishing = false;
  for (int it = 0; it <= kCorrectorMaxIterations; ++it) {
    const ResidualReport r = residual(u, mu, spec);
    const double c = cu(u.interior()) + cmu * mu - target;
    if (!std::isfinite(r.max_norm) || !std::isfinite(c)) return out;
    const bool converged = it > 0 && r.max_norm <= tol * std::max(sup(u.interior()), 1e-300);
    if (polishing) {
      out.ok = converged;
      return out;
    }
    if (converged) polishing = true;
    if (it == kCorrectorMaxIterations) return out;
    const Linearization lin = linearize(spec, u, mu);
    const FixedPointJacobian jac(spec.grid(), lin.d_s);
    const BorderedSolver bs(jac, lin.d_mu, cu, cmu, h);
    Vec r1(r.fixed_point.interior().begin(), r.fixed_point.interior().end());
    for (double& x : r1) x = -x;
    Vec du;
    double dmu = 0.0;
    bs.solve(r1, -c, du, dmu);
    auto ui = u.interior();
    for (std::size_t i = 0; i < ui.size(); ++i) ui[i] += du[i];
    mu += dmu;
    if (!polishing) out.iterations = it + 1;
  }
  return out;
}

BranchPoint make_point(double mu, SampledFn u, double arclength, int iterations) {
  const ENorm norm = e_norm(u);
  NodalProfile profile = nodal_profile(u);
  return BranchPoint{mu, std::move(u), norm, std::move(profile), arclength, iterations};
}

bool has_double_zero(const NodalProfile& p) {
  return std::any_of(p.zeros.begin(), p.zeros.end(),
                     [](const ZeroRecord& z) { return z.kind == ZeroKind::GeneralizedDouble; });
}

double max_m(const SampledFn& m) {
  const auto in = m.interior();
  return *std::max_element(in.begin(), in.end());
}

double min_m(const SampledFn& m) {
  const auto in = m.interior();
  return *std::min_element(in.begin(), in.end());
}

}  // namespace

void ContinuationConfig::validate() const {
  if (!(ds_min > 0.0 && ds_min <= ds && ds <= ds_max)) {
    throw Error(ErrorKind::Usage, "continuation steps must satisfy 0 < ds_min <= ds <= ds_max");
  }
  if (!(eps_start > 0.0 && corrector_tol > 0.0 && norm_budget > 0.0 && max_steps > 0)) {
    throw Error(ErrorKind::Usage, "eps_start, corrector_tol, norm_budget and max_steps must be positive");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::NormBudget: return "NormBudget";
    case Termination::StepFailure: return "StepFailure";
    case Termination::HyperplaneGoal: return "HyperplaneGoal";
    case Termination::MaxSteps: return "MaxSteps";
    case Termination::Falsification: return "Falsification";
  }
  return "Unknown";
}

double bifurcation_value(const ProblemSpec& spec, double mu_k) {
  if (const auto* a = std::get_if<Autonomous>(&spec.kind)) return mu_k / (a->gamma * a->f.f0);
  return mu_k;
}

BranchStart bifurcation_start(int k, int nu, int sigma, const ProblemSpec& spec,
                              const ContinuationConfig& config) {
  const int want = std::min(k + 2, kMaxEigenCount);
  const bool pos_side = max_m(spec.m) > 0.0;
  const bool neg_side = min_m(spec.m) < 0.0;
  const SpectrumResult spectrum =
      eigen_pencil(spec.m, pos_side ? (nu > 0 ? want : 2) : 0, neg_side ? (nu < 0 ? want : 2) : 0,
                   "custom", false);
  return bifurcation_start(k, nu, sigma, spec, config, spectrum);
}

BranchStart bifurcation_start(int k, int nu, int sigma, const ProblemSpec& spec,
                              const ContinuationConfig& config, const SpectrumResult& spectrum) {
  config.validate();
  if (sigma != 1 && sigma != -1) throw Error(ErrorKind::Usage, "sigma must be +1 or -1");
  const EigenPair& pair = spectrum.pair(k, nu);
  const double h = spec.grid().h();
  const double mu_b = bifurcation_value(spec, pair.mu);
  std::vector<double> others;
  for (const auto* list : {&spectrum.positive, &spectrum.negative}) {
    for (const auto& p : *list) {
      if (!(p.k == k && p.nu == nu)) others.push_back(bifurcation_value(spec, p.mu));
    }
  }
  const SampledFn& phi = pair.phi;
  const double phi2 = inner(phi, phi);
  const Functional pin = [&phi, phi2, h](std::span<const double> x) {
    const auto p = phi.interior();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * p[i];
    return h * s / phi2;
  };

  std::string last_issue = "corrector diverged";
  double eps = config.eps_start;
  for (int attempt = 0; attempt <= kStartHalvings; ++attempt, eps *= 0.5) {
    SampledFn u = (eps * sigma) * phi;
    double mu = mu_b;
    const Corrected c = correct(u, mu, spec, pin, 0.0, eps * sigma, config.corrector_tol);
    if (!c.ok) {
      last_issue = "corrector did not converge";
      continue;
    }
    BranchPoint pt = make_point(mu, std::move(u), 0.0, c.iterations);
    if (pt.profile.count != k - 1 || pt.profile.sigma != sigma || !pt.profile.is_nodal) {
      std::ostringstream msg;
      msg << "start point has " << pt.profile.count << " zeros and sign " << pt.profile.sigma
          << ", expected " << k - 1 << " and " << sigma;
      last_issue = msg.str();
      continue;
    }
    return BranchStart{k, nu, sigma, mu_b, eps, phi, std::move(others), std::move(pt)};
  }
  throw Error(ErrorKind::StartFailure, "no start point near mu = " + std::to_string(mu_b) + " for k=" +
                                           std::to_string(k) + ": " + last_issue);
}

Branch trace_branch(const BranchStart& start, const ProblemSpec& spec, const ContinuationConfig& config,
                    const BranchGoal& goal) {
  config.validate();
  const double h = spec.grid().h();
  Branch br;
  br.k = start.k;
  br.nu = start.nu;
  br.sigma = start.sigma;
  br.origin_mu = start.origin_mu;
  br.eps = start.eps;
  br.points.push_back(start.point);

  double ds = config.ds;
  for (int step = 1; step <= config.max_steps; ++step) {
    const BranchPoint& cur = br.points.back();
    Tangent tan;
    if (br.points.size() == 1) {
      Vec dir(start.phi.interior().begin(), start.phi.interior().end());
      for (double& x : dir) x *= start.sigma;
      tan = normalized_tangent(0.0, std::move(dir), h);
    } else {
      const BranchPoint& prev = br.points[br.points.size() - 2];
      Vec du(cur.u.interior().begin(), cur.u.interior().end());
      const auto pu = prev.u.interior();
      for (std::size_t i = 0; i < du.size(); ++i) du[i] -= pu[i];
      tan = normalized_tangent(cur.mu - prev.mu, std::move(du), h);
    }
    const Functional cu = [&tan, h](std::span<const double> x) {
      const Vec ax = second_diff(x, h);
      double s = 0.0;
      for (std::size_t i = 0; i < ax.size(); ++i) s += ax[i] * tan.au[i];
      return h * s;
    };
    const double target_base = cu(cur.u.interior()) + tan.mu * cur.mu;

    bool accepted = false;
    while (!accepted) {
      if (ds < config.ds_min) {
        br.termination = Termination::StepFailure;
        std::ostringstream msg;
        msg << "step size fell below ds_min at mu = " << cur.mu << ", e_norm = " << cur.norm.value
            << " (rejected profile changes: " << br.rejected_profile_changes
            << ", double zeros: " << br.rejected_double_zeros << ")";
        br.diagnostic = msg.str();
        return br;
      }
      SampledFn u = cur.u;
      auto ui = u.interior();
      for (std::size_t i = 0; i < ui.size(); ++i) ui[i] += ds * tan.u[i];
      double mu = cur.mu + ds * tan.mu;
      const Corrected c = correct(u, mu, spec, cu, tan.mu, target_base + ds, config.corrector_tol);
      if (!c.ok) {
        ds *= 0.5;
        continue;
      }
      NodalProfile profile;
      try {
        profile = nodal_profile(u);
      } catch (const Error&) {
        ++br.rejected_profile_changes;
        ds *= 0.5;
        continue;
      }
      if (has_double_zero(profile)) {
        ++br.rejected_double_zeros;
        ds *= 0.5;
        continue;
      }
      if (profile.count != br.k - 1 || profile.sigma != br.sigma || !profile.is_nodal) {
        ++br.rejected_profile_changes;
        ds *= 0.5;
        continue;
      }
      Vec du(u.interior().begin(), u.interior().end());
      const auto cu_prev = cur.u.interior();
      for (std::size_t i = 0; i < du.size(); ++i) du[i] -= cu_prev[i];
      const double dist = std::sqrt(metric(mu - cur.mu, du, mu - cur.mu, du, h));
      const ENorm norm = e_norm(u);
      br.points.push_back(
          BranchPoint{mu, std::move(u), norm, std::move(profile), cur.arclength + dist, c.iterations});
      accepted = true;
      if (c.iterations <= 3) ds = std::min(ds * 1.5, config.ds_max);
    }

    const BranchPoint& last = br.points.back();
    const BranchPoint& before = br.points[br.points.size() - 2];
    if (goal && goal(before, last)) {
      br.termination = Termination::HyperplaneGoal;
      return br;
    }
    if (last.norm.value >= config.norm_budget) {
      br.termination = Termination::NormBudget;
      return br;
    }
    if (last.norm.value < 0.1 * br.eps) {
      for (double other : start.others) {
        if (std::abs(last.mu - other) <= 0.05 * std::abs(other)) {
          br.termination = Termination::Falsification;
          br.diagnostic = "branch returned to the trivial line near mu = " + std::to_string(other);
          return br;
        }
      }
    }
  }
  br.termination = Termination::MaxSteps;
  return br;
}

SampledFn cross_hyperplane(const Branch& branch, const ProblemSpec& spec, double relative_tol) {
  for (const auto& p : branch.points) {
    if (std::abs(p.mu - 1.0) <= 1e-12) return p.u;
  }
  for (std::size_t i = 0; i + 1 < branch.points.size(); ++i) {
    const BranchPoint& a = branch.points[i];
    const BranchPoint& b = branch.points[i + 1];
    if ((a.mu - 1.0) * (b.mu - 1.0) > 0.0) continue;
    const double theta = (1.0 - a.mu) / (b.mu - a.mu);
    SampledFn guess = a.u + theta * (b.u - a.u);
    const double tol = relative_tol * std::max(guess.max_abs(), 1e-300);
    SampledFn u = newton(guess, 1.0, spec, tol);
    const NodalProfile prof = nodal_profile(u);
    if (prof.count != branch.k - 1 || prof.sigma != branch.sigma) {
      throw Error(ErrorKind::InvariantViolation,
                  "solution at mu = 1 left the branch's nodal class (" + std::to_string(prof.count) + " zeros)");
    }
    return u;
  }
  std::ostringstream msg;
  msg << "branch never brackets mu = 1";
  if (!branch.points.empty()) {
    msg << " (mu from " << branch.points.front().mu << " to " << branch.points.back().mu << ", e_norm "
        << branch.points.back().norm.value << ", " << to_string(branch.termination) << ")";
  }
  throw Error(ErrorKind::NoCrossing, msg.str());
}

GammaInterval admissible_gamma(double mu_k, double f0, double finf) {
  const double a = mu_k / f0;
  const double b = mu_k / finf;
  return {std::min(a, b), std::max(a, b)};
}

std::vector<GammaInterval> admissible_gamma_range(double mu_k, double mu_n, double f0, double finf) {
  if (mu_k > 0.0) return {{mu_n / finf, mu_k / f0}, {mu_n / f0, mu_k / finf}};
  return {{mu_k / f0, mu_n / finf}, {mu_k / finf, mu_n / f0}};
}

namespace {

void require_f(const AsymptoticF& f) {
  const AsymptoticsReport rep = check_asymptotics(f);
  if (!rep.h1_ok) {
    throw Error(ErrorKind::AsymptoticMismatch, "f '" + f.name + "' violates f(s) s > 0 for s != 0");
  }
}

NodalSolution solve_admitted(double gamma, const AsymptoticF& f, const SampledFn& m, int k, int nu, int sigma,
                             const ContinuationConfig& config, const SpectrumResult& spectrum) {
  const ProblemSpec spec{m, Autonomous{gamma, f}};
  const BranchStart start = bifurcation_start(k, nu, sigma, spec, config, spectrum);
  const BranchGoal goal = [](const BranchPoint& a, const BranchPoint& b) {
    return (a.mu - 1.0) * (b.mu - 1.0) <= 0.0;
  };
  Branch branch = trace_branch(start, spec, config, goal);
  SampledFn u = cross_hyperplane(branch, spec, config.corrector_tol);
  NodalProfile profile = nodal_profile(u);
  const double res = residual(u, 1.0, spec).max_norm;
  return NodalSolution{k, nu, sigma, std::move(u), std::move(profile), res, std::move(branch)};
}

SpectrumResult spectrum_for(const SampledFn& m, int count, int nu) {
  if (count > kMaxEigenCount) {
    throw Error(ErrorKind::Usage, "index beyond the " + std::to_string(kMaxEigenCount) + " computed eigenvalues");
  }
  if (nu < 0 && !(min_m(m) < 0.0)) {
    throw Error(ErrorKind::NotInWeightClass, "weight has no negative part; no negative spectrum");
  }
  return eigen_pencil(m, nu > 0 ? count : 0, nu < 0 ? count : 0, "custom", false);
}

}  // namespace

NodalSolution solve_nodal(double gamma, const AsymptoticF& f, const SampledFn& m, int k, int nu, int sigma,
                          const ContinuationConfig& config) {
  config.validate();
  require_f(f);
  const SpectrumResult spectrum = spectrum_for(m, std::min(k + 2, kMaxEigenCount), nu);
  const double mu_k = spectrum.pair(k, nu).mu;
  const GammaInterval iv = admissible_gamma(mu_k, f.f0, f.finf);
  if (!iv.contains(gamma)) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " is outside (" << iv.lo << ", " << iv.hi << ") for k = " << k
        << (nu > 0 ? ", nu = +" : ", nu = -");
    throw Error(ErrorKind::GammaNotAdmissible, msg.str());
  }
  return solve_admitted(gamma, f, m, k, nu, sigma, config, spectrum);
}

NodalRange solve_nodal_range(double gamma, const AsymptoticF& f, const SampledFn& m, int k, int n, int nu,
                             const ContinuationConfig& config) {
  config.validate();
  if (k < 1 || n < k) throw Error(ErrorKind::Usage, "need 1 <= k <= n");
  require_f(f);
  const SpectrumResult spectrum = spectrum_for(m, std::min(n + 2, kMaxEigenCount), nu);
  const auto ivs = admissible_gamma_range(spectrum.pair(k, nu).mu, spectrum.pair(n, nu).mu, f.f0, f.finf);
  NodalRange out;
  if (std::all_of(ivs.begin(), ivs.end(), [](const GammaInterval& iv) { return iv.empty(); })) {
    std::ostringstream msg;
    msg << "admissible gamma set for (k, n) = (" << k << ", " << n << ") is empty with f0 = " << f.f0
        << ", finf = " << f.finf << "; nothing to solve";
    out.notice = msg.str();
    out.skipped = true;
    return out;
  }
  if (std::none_of(ivs.begin(), ivs.end(), [gamma](const GammaInterval& iv) { return iv.contains(gamma); })) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " is outside the admissible set for (k, n) = (" << k << ", " << n << ")";
    throw Error(ErrorKind::GammaNotAdmissible, msg.str());
  }
  for (int j = k; j <= n; ++j) {
    for (int sigma : {+1, -1}) {
      out.solutions.push_back(solve_admitted(gamma, f, m, j, nu, sigma, config, spectrum));
    }
  }
  return out;
}

double min_separation(const Branch& a, const Branch& b) {
  double best = std::numeric_limits<double>::infinity();
  if (b.points.empty()) return best;
  for (const auto& p : a.points) {
    const auto q = std::min_element(b.points.begin(), b.points.end(), [&](const auto& x, const auto& y) {
      return std::abs(x.mu - p.mu) < std::abs(y.mu - p.mu);
    });
    best = std::min(best, e_norm(p.u - q->u).value);
  }
  return best;
}

}  // namespace beamspec
