#include "beamspec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <thread>

#include "beamspec/error.hpp"
#include "beamspec/linops.hpp"
#include "beamspec/nodal.hpp"
#include "beamspec/weights.hpp"

namespace beamspec {

int thread_budget() {
  if (const char* env = std::getenv("BEAMSPEC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

bool ParityReport::all_match() const {
  return std::all_of(rows.begin(), rows.end(), [](const ParityRow& r) { return r.match; });
}

ParityReport degree_parity_sweep(const SampledFn& m, const std::vector<double>& mu_samples,
                                 std::string weight_id) {
  const auto in = m.interior();
  const bool has_pos = *std::max_element(in.begin(), in.end()) > 0.0;
  const bool has_neg = *std::min_element(in.begin(), in.end()) < 0.0;
  SpectrumResult spectrum = eigen_pencil(m, has_pos ? kMaxEigenCount : 0, has_neg ? kMaxEigenCount : 0,
                                         std::move(weight_id), false);
  return degree_parity_sweep(spectrum, mu_samples);
}

ParityReport degree_parity_sweep(const SpectrumResult& spectrum, const std::vector<double>& mu_samples) {
  ParityReport report;
  report.weight_id = spectrum.weight_id;
  const std::vector<double> eigs = spectrum.eigenvalues();
  const double last_pos = spectrum.positive.empty() ? 0.0 : spectrum.positive.back().mu;
  const double last_neg = spectrum.negative.empty() ? 0.0 : spectrum.negative.back().mu;
  const bool pos_complete = spectrum.positive.size() < static_cast<std::size_t>(kMaxEigenCount);
  const bool neg_complete = spectrum.negative.size() < static_cast<std::size_t>(kMaxEigenCount);

  std::vector<double> kept;
  for (double mu : mu_samples) {
    bool ok = true;
    for (double ev : eigs) {
      if (std::abs(mu - ev) <= 1e-6 * std::abs(ev)) ok = false;
    }
    if (mu > 0.0 && !pos_complete && mu >= last_pos) ok = false;
    if (mu < 0.0 && !neg_complete && mu <= last_neg) ok = false;
    (ok ? kept : report.skipped).push_back(mu);
  }
  std::sort(kept.begin(), kept.end());
  report.rows.resize(kept.size());

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < kept.size(); i += stride) {
      const double mu = kept[i];
      ParityRow row;
      row.mu = mu;
      for (double ev : eigs) {
        if ((mu > 0.0 && ev > 0.0 && ev < mu) || (mu < 0.0 && ev < 0.0 && ev > mu)) ++row.eigen_count_below;
      }
      row.expected_sign = row.eigen_count_below % 2 == 0 ? 1 : -1;
      row.det_sign = det_sign_psi(mu, spectrum.weight);
      row.match = row.det_sign == row.expected_sign;
      report.rows[i] = row;
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), kept.size());
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  return report;
}

std::vector<double> parity_samples(const SpectrumResult& spectrum, int per_side) {
  std::vector<double> out;
  // An empty side borrows the magnitudes of the other one; every sample there has count 0.
  auto side = [&](const std::vector<EigenPair>& own, const std::vector<EigenPair>& other, double sign) {
    const auto& list = own.empty() ? other : own;
    if (list.empty() || per_side <= 0) return;
    const double lo = std::abs(list.front().mu) / 4.0;
    const double hi = std::abs(list.back().mu);
    for (int i = 0; i < per_side; ++i) {
      const double frac = per_side == 1 ? 0.5 : static_cast<double>(i) / (per_side - 1);
      // Stay strictly below the last computed eigenvalue.
      const double v = lo * std::pow(hi * 0.999 / lo, frac);
      out.push_back(sign * v);
    }
  };
  side(spectrum.positive, spectrum.negative, 1.0);
  side(spectrum.negative, spectrum.positive, -1.0);
  return out;
}

namespace {

double fixed_point_defect(const SampledFn& b, const SampledFn& u) {
  SampledFn bu(u.grid());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) bu[i] = b[i] * u[i];
  const SampledFn r = u - lambda2(bu);
  const double e = e_norm(u).value;
  return e > 0.0 ? r.max_abs() / e : INFINITY;
}

}  // namespace

SturmVerdict sturm_check(const SampledFn& b1, const SampledFn& b2, const SampledFn& u1, const SampledFn& u2) {
  require_same_grid(b1, b2);
  require_same_grid(b1, u1);
  require_same_grid(b1, u2);
  for (std::size_t i = 1; i + 1 < b1.size(); ++i) {
    if (!(b1[i] > 0.0)) throw Error(ErrorKind::HypothesisViolated, "b1 is not positive on the interior");
    if (!(b2[i] > b1[i])) throw Error(ErrorKind::HypothesisViolated, "b2 > b1 fails on the interior");
  }
  SturmVerdict v;
  v.residual1 = fixed_point_defect(b1, u1);
  v.residual2 = fixed_point_defect(b2, u2);
  if (!(v.residual1 <= kSturmResidual) || !(v.residual2 <= kSturmResidual)) {
    throw Error(ErrorKind::HypothesisViolated, "u1 or u2 does not solve u'''' = b u (relative defect " +
                                                   std::to_string(std::max(v.residual1, v.residual2)) + ")");
  }
  v.zeros1 = nodal_profile(u1).count;
  v.zeros2 = nodal_profile(u2).count;
  v.pass = v.zeros2 >= v.zeros1 + 1;
  return v;
}

int SturmSuiteReport::passed() const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const SturmCase& c) { return c.pass; }));
}

SturmSuiteReport sturm_suite(int pairs, std::uint64_t seed, int n_interior) {
  constexpr double kPi = std::numbers::pi;
  SturmSuiteReport rep;
  rep.seed = seed;
  rep.n = n_interior;
  const Grid grid(n_interior);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.7, 0.7);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::uniform_int_distribution<int> pick_k(1, 3);
  std::uniform_int_distribution<int> pick_gap(0, 2);

  auto random_weight = [&] {
    double a[3], p[3];
    for (int j = 0; j < 3; ++j) {
      a[j] = amp(rng);
      p[j] = phase(rng);
    }
    return SampledFn::sample(grid, [a, p](double t) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += a[j] * std::sin((j + 1) * kPi * t + p[j]);
      return std::exp(s);
    });
  };
  auto scaled = [](double c, const SampledFn& m) { return c * m; };

  bool controls_done = false;
  const int max_draws = 50 * std::max(pairs, 1);
  while (static_cast<int>(rep.cases.size()) < pairs && rep.draws < max_draws) {
    ++rep.draws;
    const int k1 = pick_k(rng);
    const int k2 = k1 + pick_gap(rng);
    const SampledFn m1 = random_weight();
    const SampledFn m2 = random_weight();
    const SpectrumResult s1 = eigen_pencil(m1, k1, 0, "sturm", false);
    const SpectrumResult s2 = eigen_pencil(m2, k2, 0, "sturm", false);
    const SampledFn b1 = scaled(s1.pair(k1, 1).mu, m1);
    const SampledFn b2 = scaled(s2.pair(k2, 1).mu, m2);
    bool ordered = true;
    for (std::size_t i = 1; i + 1 < b1.size(); ++i) {
      if (!(b2[i] > b1[i])) ordered = false;
    }
    if (!ordered) continue;
    const SampledFn& u1 = s1.pair(k1, 1).phi;
    const SampledFn& u2 = s2.pair(k2, 1).phi;
    SturmCase c{k1, k2, 0, 0, false};
    try {
      const SturmVerdict v = sturm_check(b1, b2, u1, u2);
      c.zeros1 = v.zeros1;
      c.zeros2 = v.zeros2;
      c.pass = v.pass;
    } catch (const Error&) {
      c.pass = false;
    }
    rep.cases.push_back(c);
    if (!controls_done) {
      controls_done = true;
      auto rejected = [&](const SampledFn& x1, const SampledFn& x2, const SampledFn& y1, const SampledFn& y2) {
        try {
          return !sturm_check(x1, x2, y1, y2).pass;
        } catch (const Error& e) {
          return e.kind() == ErrorKind::HypothesisViolated;
        }
      };
      rep.identical_control_rejected = rejected(b1, b2, u1, u1);
      rep.swapped_control_rejected = rejected(b2, b1, u2, u1);
    }
  }
  return rep;
}

DivergenceReport divergence_check(const SampledFn& m, int side, int j_max) {
  if (j_max < 1 || j_max > kMaxEigenCount) {
    throw Error(ErrorKind::Usage, "j_max must lie in [1, " + std::to_string(kMaxEigenCount) + "]");
  }
  const auto in = m.interior();
  if (side < 0 && !(*std::min_element(in.begin(), in.end()) < 0.0)) {
    throw Error(ErrorKind::NotInWeightClass, "weight has no negative part; no negative sequence");
  }
  const SpectrumResult s = eigen_pencil(m, side > 0 ? j_max : 0, side < 0 ? j_max : 0, "custom", false);
  DivergenceReport rep;
  rep.side = side;
  rep.pass = true;
  for (const auto& p : side > 0 ? s.positive : s.negative) {
    const int c = nodal_profile(p.phi).count;
    rep.counts.push_back(c);
    if (c != p.k - 1) rep.pass = false;
  }
  if (static_cast<int>(rep.counts.size()) != j_max) rep.pass = false;
  return rep;
}

SpacingReport spacing_check(int j_max, int n_interior) {
  if (j_max < 1 || j_max > 8) throw Error(ErrorKind::Usage, "spacing_check supports j_max in [1, 8]");
  const Grid grid(n_interior);
  const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(grid), j_max, 0, "one", false);
  SpacingReport rep;
  rep.pass = true;
  for (const auto& p : s.positive) {
    SpacingRow row;
    row.j = p.k;
    std::vector<double> z = find_zeros(p.phi);
    z.insert(z.begin(), 0.0);
    z.push_back(1.0);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
      const double gap = z[i + 1] - z[i];
      row.gaps.push_back(gap);
      row.max_error = std::max(row.max_error, std::abs(gap - 1.0 / p.k));
    }
    row.pass = static_cast<int>(row.gaps.size()) == p.k && row.max_error <= kSpacingTolerance;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace beamspec
