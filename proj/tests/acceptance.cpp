#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "beamspec/analysis.hpp"
#include "beamspec/cli.hpp"
#include "beamspec/continuation.hpp"
#include "beamspec/error.hpp"
#include "beamspec/nodal.hpp"
#include "beamspec/spectrum.hpp"
#include "beamspec/weights.hpp"
#include "oracles.hpp"

using namespace beamspec;

namespace {

constexpr int kN = 2000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool has_negative(const SampledFn& m) {
  const auto in = m.interior();
  return *std::min_element(in.begin(), in.end()) < 0.0;
}

const std::vector<std::string> kSignChanging{"sin3pi", "cos2pi", "linear_ramp"};

Outcome analytic_spectrum() {
  const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(Grid(kN)), 6, 1, "one", false);
  double worst = 0.0;
  for (int k = 1; k <= 6; ++k) worst = std::max(worst, std::abs(s.pair(k, 1).mu / oracle::continuous_mu_one(k) - 1.0));
  const bool ok = worst <= 1e-3 && s.negative.empty() && s.no_negative_spectrum;
  return {ok, "max |mu_k/(k pi)^4 - 1| = " + fmt("%.3e", worst) + (s.negative.empty() ? ", no negative spectrum" : "")};
}

Outcome nodal_law() {
  bool ok = true;
  std::string detail;
  for (const auto& name : kSignChanging) {
    const SpectrumResult s = eigen_pencil(builtin_weight(name).sample(Grid(kN)), 6, 6, name, false);
    std::string counts;
    int bad = 0;
    for (const auto* list : {&s.positive, &s.negative}) {
      for (const auto& p : *list) {
        const NodalProfile prof = nodal_profile(p.phi);
        const bool simple = std::all_of(prof.zeros.begin(), prof.zeros.end(),
                                        [](const ZeroRecord& z) { return z.kind == ZeroKind::GeneralizedSimple; });
        if (prof.count != p.k - 1 || !simple) ++bad;
        counts += (counts.empty() || counts.back() == ' ' ? "" : ",") + std::to_string(prof.count);
      }
      if (list == &s.positive) counts += " / ";
    }
    if (bad > 0) ok = false;
    detail += (detail.empty() ? "" : "; ") + name + " +/- counts " + counts + " (" + std::to_string(bad) + "/12 off)";
  }
  return {ok, detail};
}

Outcome pencil_vs_shooting() {
  double worst = 0.0;
  int compared = 0;
  for (const auto& name : kSignChanging) {
    const Weight w = builtin_weight(name);
    const ExtrapolatedSpectrum x = extrapolated_spectrum(w, kN, 6, 6, false);
    for (const auto* side : {&x.positive, &x.negative}) {
      for (std::size_t i = 0; i < side->size(); ++i) {
        const double mu = (*side)[i];
        double gap = 0.01 * std::abs(mu);
        if (i > 0) gap = std::min(gap, 0.5 * std::abs(mu - (*side)[i - 1]));
        if (i + 1 < side->size()) gap = std::min(gap, 0.5 * std::abs((*side)[i + 1] - mu));
        const double shot = eigen_shoot(w.eval, {mu - gap, mu + gap});
        worst = std::max(worst, std::abs(shot - mu) / std::abs(mu));
        ++compared;
      }
    }
  }
  return {worst <= 1e-6, std::to_string(compared) + " eigenvalues, max relative gap " + fmt("%.3e", worst)};
}

Outcome degree_parity() {
  bool ok = true;
  std::string detail;
  for (const auto& name : builtin_weight_names()) {
    const SampledFn m = builtin_weight(name).sample(Grid(kN));
    const bool neg = has_negative(m);
    const SpectrumResult s = eigen_pencil(m, kMaxEigenCount, neg ? kMaxEigenCount : 0, name, false);
    const ParityReport r = degree_parity_sweep(s, parity_samples(s, 25));
    const auto bad = std::count_if(r.rows.begin(), r.rows.end(), [](const ParityRow& row) { return !row.match; });
    if (bad > 0 || r.rows.size() < 40) ok = false;
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(bad) + "/" + std::to_string(r.rows.size());
  }
  return {ok, "mismatches " + detail};
}

Outcome sturm() {
  const SturmSuiteReport r = sturm_suite(200, 1, kN);
  const bool ok = r.passed() == 200 && r.cases.size() == 200 && r.identical_control_rejected &&
                  r.swapped_control_rejected;
  return {ok, std::to_string(r.passed()) + "/200 pairs (" + std::to_string(r.draws) + " draws), controls " +
                  (r.identical_control_rejected && r.swapped_control_rejected ? "rejected" : "NOT rejected")};
}

Outcome branches_without_double_zeros(const std::vector<LabeledBranch>& bs) {
  int doubles = 0, short_ones = 0, points = 0;
  for (const auto& lb : bs) {
    points += static_cast<int>(lb.branch.points.size());
    if (lb.branch.points.size() < 100) ++short_ones;
    for (const auto& p : lb.branch.points) {
      for (const auto& z : p.profile.zeros) doubles += z.kind == ZeroKind::GeneralizedDouble;
    }
  }
  const bool ok = bs.size() >= 8 && short_ones == 0 && doubles == 0;
  return {ok, std::to_string(bs.size()) + " branches, " + std::to_string(points) + " points, " +
                  std::to_string(short_ones) + " under 100 points, " + std::to_string(doubles) + " double zeros"};
}

Outcome branch_containment(const std::vector<LabeledBranch>& bs) {
  int breaks = 0;
  for (const auto& lb : bs) {
    for (const auto& p : lb.branch.points) {
      if (p.profile.count != lb.branch.k - 1 || p.profile.sigma != lb.branch.sigma || !p.profile.is_nodal) ++breaks;
    }
  }
  double worst = std::numeric_limits<double>::infinity();
  bool sep_ok = true;
  for (std::size_t i = 0; i + 1 < bs.size(); i += 2) {
    const Branch& a = bs[i].branch;
    const Branch& b = bs[i + 1].branch;
    const double d = min_separation(a, b);
    worst = std::min(worst, d);
    if (!(a.k == b.k && a.sigma == -b.sigma && d > 0.5 * std::min(a.eps, b.eps))) sep_ok = false;
  }
  return {breaks == 0 && sep_ok,
          std::to_string(breaks) + " points leave their (k-1, sigma) class; min sigma separation " + fmt("%.3e", worst)};
}

Outcome nodal_solutions() {
  const SampledFn m = builtin_weight("one").sample(Grid(kN));
  const AsymptoticF f = builtin_asymptotic("saturating");
  const SpectrumResult s = eigen_pencil(m, 3, 0, "one", false);
  const ContinuationConfig cfg;
  bool ok = true;
  double worst_res = 0.0, worst_oracle = 0.0;
  for (int k : {1, 2}) {
    const double gamma = 0.75 * s.pair(k, 1).mu;
    for (int sigma : {+1, -1}) {
      const NodalSolution sol = solve_nodal(gamma, f, m, k, 1, sigma, cfg);
      worst_res = std::max(worst_res, sol.residual);
      if (sol.profile.count != k - 1 || sol.profile.sigma != sigma) ok = false;
      const double h = m.grid().h();
      const oracle::ShootResult shot = oracle::shoot_nonlinear(f.f, f.derivative, gamma, kN,
                                                               (sol.u[1] - sol.u[0]) / h, derivative(sol.u, 3)[0]);
      if (!shot.converged) {
        ok = false;
        continue;
      }
      for (std::size_t i = 0; i < sol.u.size(); ++i) worst_oracle = std::max(worst_oracle, std::abs(sol.u[i] - shot.nodes[i]));
    }
  }
  if (!(worst_res <= 1e-8) || !(worst_oracle <= 1e-4)) ok = false;

  bool rejected = false;
  try {
    solve_nodal(0.25 * s.pair(1, 1).mu, f, m, 1, 1, 1, cfg);
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::GammaNotAdmissible;
  }
  const NodalRange skipped = solve_nodal_range(0.75 * s.pair(1, 1).mu, f, m, 1, 2, 1, cfg);
  const bool skip_ok = skipped.skipped && skipped.solutions.empty() && !skipped.notice.empty();

  const AsymptoticF wide = builtin_asymptotic("saturating", {{"f0", 1.0}, {"finf", 32.0}});
  const NodalRange four = solve_nodal_range(0.75 * s.pair(1, 1).mu, wide, m, 1, 2, 1, cfg);
  bool four_ok = four.solutions.size() == 4;
  for (const auto& sol : four.solutions) {
    if (sol.profile.count != sol.k - 1 || !(sol.residual <= 1e-8)) four_ok = false;
  }
  ok = ok && rejected && skip_ok && four_ok;
  return {ok, "max residual " + fmt("%.2e", worst_res) + ", max shooting gap " + fmt("%.2e", worst_oracle) +
                  ", 0.25 mu_1 " + (rejected ? "rejected" : "NOT rejected") + ", (1,2) range " +
                  (skip_ok ? "skipped with notice" : "NOT skipped") + ", finf = 32 range gave " +
                  std::to_string(four.solutions.size()) + " solutions"};
}

Outcome zero_spacing() {
  const SpacingReport r = spacing_check(8, kN);
  double worst = 0.0;
  for (const auto& row : r.rows) worst = std::max(worst, row.max_error);
  return {r.pass && r.rows.size() == 8, "j = 1..8, max |gap - 1/j| = " + fmt("%.3e", worst)};
}

Outcome convergence() {
  const double exact = oracle::continuous_mu_one(1);
  double errs[3];
  const int ns[3] = {500, 1000, 2000};
  for (int i = 0; i < 3; ++i) {
    errs[i] = std::abs(eigen_pencil(builtin_weight("one").sample(Grid(ns[i])), 1, 0, "one", false).pair(1, 1).mu - exact);
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  return {r1 >= 3.8 && r1 <= 4.2 && r2 >= 3.8 && r2 <= 4.2, "ratios " + fmt("%.4f", r1) + ", " + fmt("%.4f", r2)};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  std::vector<LabeledBranch> branches;
  const Outcome traced = guarded([&] {
    branches = verify_all_branches(kN, ContinuationConfig{});
    return Outcome{true, ""};
  });

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"analytic spectrum for m = 1", analytic_spectrum},
      {"nodal count law", nodal_law},
      {"pencil vs shooting", pencil_vs_shooting},
      {"degree parity", degree_parity},
      {"sturm comparison", sturm},
      {"branches without double zeros",
       [&] { return traced.pass ? branches_without_double_zeros(branches) : traced; }},
      {"branch containment", [&] { return traced.pass ? branch_containment(branches) : traced; }},
      {"nodal solutions", nodal_solutions},
      {"zero spacing", zero_spacing},
      {"second-order convergence", convergence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Outcome o = guarded(criteria[i].run);
    failed += !o.pass;
    std::printf("%s %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
