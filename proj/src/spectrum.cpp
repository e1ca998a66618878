#include "beamspec/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "beamspec/dense.hpp"
#include "beamspec/error.hpp"
#include "beamspec/linops.hpp"
#include "beamspec/nodal.hpp"

namespace beamspec {

namespace {

constexpr double kNullFraction = 1e-10;     // tau_null relative to max |nu|
constexpr double kRitzResidual = 1e-13;     // Lanczos convergence, relative to max |theta|
constexpr double kDegenerateGap = 1e-6;

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

struct Candidate {
  double nu;
  Vec y;  // eigenvector of the symmetric reduced operator
};

void validate_request(const SampledFn& m, int count_pos, int count_neg) {
  if (count_pos < 0 || count_neg < 0 || count_pos > kMaxEigenCount || count_neg > kMaxEigenCount) {
    throw Error(ErrorKind::Usage, "eigenvalue counts must lie in [0, " +
                                      std::to_string(kMaxEigenCount) + "]");
  }
  const auto in = m.interior();
  const double mmax = *std::max_element(in.begin(), in.end());
  if (count_pos > 0 && !(mmax > 0.0)) {
    throw Error(ErrorKind::NotInWeightClass, "weight has no positive part; no positive spectrum");
  }
}

/// Turns reduced eigenvectors into normalized, indexed, nodal-checked pairs.
SpectrumResult assemble(const SampledFn& m, std::string weight_id, std::vector<Candidate> pos,
                        std::vector<Candidate> neg, int count_neg, bool verify_nodal,
                        const std::function<SampledFn(const Vec&)>& to_phi) {
  SpectrumResult r{std::move(weight_id), m.grid(), m, {}, {}, false, {}};
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return a.nu > b.nu; });
  std::sort(neg.begin(), neg.end(), [](const auto& a, const auto& b) { return a.nu < b.nu; });
  auto build = [&](std::vector<Candidate>& list, int nu, std::vector<EigenPair>& out) {
    int k = 0;
    for (auto& c : list) {
      ++k;
      SampledFn phi = to_phi(c.y);
      phi *= 1.0 / e_norm(phi).value;
      if (sign_near_origin(phi) < 0) phi *= -1.0;
      const NodalProfile prof = nodal_profile(phi);
      if (verify_nodal && (prof.count != k - 1 || !prof.is_nodal)) {
        throw Error(ErrorKind::NodalMismatch,
                    "eigenfunction k=" + std::to_string(k) + (nu > 0 ? "+" : "-") + " has " +
                        std::to_string(prof.count) + " interior zeros; grid too coarse?");
      }
      out.push_back({k, nu, 1.0 / c.nu, std::move(phi)});
    }
  };
  build(pos, +1, r.positive);
  build(neg, -1, r.negative);
  if (count_neg > 0 && r.negative.empty()) r.no_negative_spectrum = true;
  auto check_gaps = [&](const std::vector<EigenPair>& list) {
    for (std::size_t i = 0; i + 1 < list.size(); ++i) {
      if (std::abs(list[i + 1].mu - list[i].mu) <= kDegenerateGap * std::abs(list[i].mu)) {
        r.warnings.push_back("near-degenerate eigenvalues at k=" + std::to_string(list[i].k));
      }
    }
  };
  check_gaps(r.positive);
  check_gaps(r.negative);
  return r;
}

}  // namespace

const EigenPair& SpectrumResult::pair(int k, int nu) const {
  const auto& list = nu > 0 ? positive : negative;
  if (k < 1 || static_cast<std::size_t>(k) > list.size()) {
    throw Error(ErrorKind::Usage, "eigenpair k=" + std::to_string(k) + " was not computed");
  }
  return list[static_cast<std::size_t>(k - 1)];
}

std::vector<double> SpectrumResult::eigenvalues() const {
  std::vector<double> v;
  for (const auto& p : positive) v.push_back(p.mu);
  for (const auto& p : negative) v.push_back(p.mu);
  return v;
}

SpectrumResult eigen_pencil(const SampledFn& m, int count_pos, int count_neg,
                            std::string weight_id, bool verify_nodal) {
  validate_request(m, count_pos, count_neg);
  const std::size_t n = static_cast<std::size_t>(m.grid().n_interior());
  const double h = m.grid().h();
  const auto in = m.interior();
  const double mmin = *std::min_element(in.begin(), in.end());
  const int want_neg = mmin < 0.0 ? count_neg : 0;
  const int want_pos = count_pos;

  auto apply = [&](const Vec& x, Vec& y) {
    y = x;
    lambda_solve_inplace(y, h);
    for (std::size_t i = 0; i < n; ++i) y[i] *= in[i];
    lambda_solve_inplace(y, h);
  };

  std::mt19937_64 rng(0x5eedULL + n);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_vec = [&] {
    Vec v(n);
    for (auto& x : v) x = unif(rng);
    return v;
  };

  std::vector<Vec> q;
  Vec alpha, beta;
  const std::size_t max_dim = std::min<std::size_t>(n, 600);
  Vec start = random_vec();
  {
    const double s = norm(start);
    for (auto& x : start) x /= s;
  }
  q.push_back(std::move(start));

  std::vector<Candidate> pos, neg;
  std::vector<double> previous;
  bool converged = false;
  const std::size_t first_check =
      std::min<std::size_t>(max_dim, static_cast<std::size_t>(want_pos + want_neg) + 12);

  Vec w(n);
  for (std::size_t j = 0; j < max_dim; ++j) {
    apply(q[j], w);
    const double a = dot(q[j], w);
    alpha.push_back(a);
    // Full reorthogonalization, two passes.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : q) axpy(-dot(qi, w), qi, w);
    }
    double b = norm(w);
    const double scale = std::abs(*std::max_element(alpha.begin(), alpha.end(),
                                                    [](double x, double y) { return std::abs(x) < std::abs(y); }));
    const bool last = (j + 1 == max_dim);
    if (!last && b <= 1e-14 * std::max(scale, 1e-300)) {
      // Invariant subspace: continue from a fresh direction orthogonal to q.
      w = random_vec();
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& qi : q) axpy(-dot(qi, w), qi, w);
      const double s = norm(w);
      for (auto& x : w) x /= s;
      b = 0.0;
      beta.push_back(b);
      q.push_back(w);
    } else {
      beta.push_back(b);
      if (!last) {
        Vec next = w;
        for (auto& x : next) x /= b;
        q.push_back(std::move(next));
      }
    }

    const std::size_t dim = j + 1;
    if (dim < first_check || (dim - first_check) % 8 != 0) {
      if (!last) continue;
    }

    DenseMatrix t(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < dim) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    const SymmetricEigen eig = jacobi_eigen(t, 1e-15);
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return eig.values[x] > eig.values[y]; });
    double theta_max = 0.0;
    for (double v : eig.values) theta_max = std::max(theta_max, std::abs(v));
    const double null_cut = kNullFraction * theta_max;
    const double res_cut = kRitzResidual * theta_max;
    const double beta_last = beta[dim - 1];

    std::vector<std::size_t> chosen;
    bool ok = true;
    int got_pos = 0, got_neg = 0;
    for (std::size_t idx : order) {
      if (got_pos >= want_pos) break;
      if (eig.values[idx] <= null_cut) break;
      chosen.push_back(idx);
      ++got_pos;
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (got_neg >= want_neg) break;
      if (eig.values[*it] >= -null_cut) break;
      chosen.push_back(*it);
      ++got_neg;
    }
    if (got_pos < want_pos || got_neg < want_neg) ok = (dim == n);
    for (std::size_t idx : chosen) {
      if (beta_last * std::abs(eig.vectors(dim - 1, idx)) > res_cut) ok = false;
    }
    std::vector<double> current;
    for (std::size_t idx : chosen) current.push_back(eig.values[idx]);
    if (ok && current.size() == previous.size()) {
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (std::abs(current[i] - previous[i]) > 1e-13 * theta_max) ok = false;
      }
    } else if (dim < n) {
      ok = false;
    }
    previous = current;
    if (ok || last) {
      if (!ok) throw Error(ErrorKind::NoConvergence, "Lanczos did not converge");
      for (std::size_t idx : chosen) {
        Vec y(n, 0.0);
        for (std::size_t i = 0; i < dim; ++i) axpy(eig.vectors(i, idx), q[i], y);
        Candidate c{eig.values[idx], std::move(y)};
        (c.nu > 0 ? pos : neg).push_back(std::move(c));
      }
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "Lanczos did not converge");

  auto to_phi = [&](const Vec& y) {
    SampledFn phi(m.grid());
    auto pin = phi.interior();
    std::copy(y.begin(), y.end(), pin.begin());
    lambda_solve_inplace(pin, h);
    return phi;
  };
  return assemble(m, std::move(weight_id), std::move(pos), std::move(neg), count_neg, verify_nodal, to_phi);
}

SpectrumResult eigen_pencil_dense(const SampledFn& m, int count_pos, int count_neg,
                                  std::string weight_id, bool verify_nodal) {
  validate_request(m, count_pos, count_neg);
  const std::size_t n = static_cast<std::size_t>(m.grid().n_interior());
  if (n > 400) throw Error(ErrorKind::Usage, "dense pencil route is limited to n <= 400");

  std::vector<double> zero(n, 0.0);
  const BandedLU band = stiffness_band(m.grid(), zero);
  DenseMatrix k(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(n - 1, i + 2); ++j) k(i, j) = band.at(i, j);

  const DenseMatrix l = cholesky(k);  // K = L L^T, R = L^T
  // X = L^{-1} by forward substitution on the identity.
  DenseMatrix x(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t p = c; p < i; ++p) s -= l(i, p) * x(p, c);
      x(i, c) = s / l(i, i);
    }
  }
  // S = X M X^T.
  DenseMatrix s(n);
  const auto in = m.interior();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p <= j; ++p) acc += x(i, p) * in[p] * x(j, p);
      s(i, j) = s(j, i) = acc;
    }
  }
  const SymmetricEigen eig = jacobi_eigen(s, 1e-14);
  double vmax = 0.0;
  for (double v : eig.values) vmax = std::max(vmax, std::abs(v));
  std::vector<Candidate> pos, neg;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = eig.values[i];
    if (std::abs(v) <= kNullFraction * vmax) continue;
    Vec y(n);
    for (std::size_t r = 0; r < n; ++r) y[r] = eig.vectors(r, i);
    (v > 0 ? pos : neg).push_back({v, std::move(y)});
  }
  std::sort(pos.begin(), pos.end(), [](const auto& a, const auto& b) { return a.nu > b.nu; });
  std::sort(neg.begin(), neg.end(), [](const auto& a, const auto& b) { return a.nu < b.nu; });
  if (pos.size() > static_cast<std::size_t>(count_pos)) pos.resize(static_cast<std::size_t>(count_pos));
  if (neg.size() > static_cast<std::size_t>(count_neg)) neg.resize(static_cast<std::size_t>(count_neg));

  auto to_phi = [&](const Vec& y) {
    // phi = R^{-1} y = X^T y
    SampledFn phi(m.grid());
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t p = i; p < n; ++p) acc += x(p, i) * y[p];
      phi[i + 1] = acc;
    }
    return phi;
  };
  return assemble(m, std::move(weight_id), std::move(pos), std::move(neg), count_neg, verify_nodal, to_phi);
}

double shoot_determinant(const std::function<double(double)>& m, double mu) {
  // 2x2 minors of the 4x2 solution matrix whose columns start from
  // (u,u',u'',u''') = (0,1,0,0) and (0,0,0,1). d(mu) = minor of rows (u, u'') at t=1.
  std::array<double, 6> p{0, 0, 0, 0, 1, 0};  // p01 p02 p03 p12 p13 p23
  double mmax = 0.0;
  for (int i = 0; i <= 64; ++i) mmax = std::max(mmax, std::abs(m(i / 64.0)));
  const double rate = std::pow(std::abs(mu) * std::max(mmax, 1e-300), 0.25);
  const double hmax = std::min(1e-4, rate > 0.0 ? 0.05 / rate : 1e-4);
  const int steps = static_cast<int>(std::ceil(1.0 / hmax));
  const double dt = 1.0 / steps;

  auto rhs = [](double c, const std::array<double, 6>& y) {
    return std::array<double, 6>{y[1], y[3] + y[2], y[4], y[4], y[5] - c * y[0], -c * y[1]};
  };
  double t = 0.0;
  double c0 = mu * m(0.0);
  for (int s = 0; s < steps; ++s) {
    const double cm = mu * m(t + 0.5 * dt);
    const double c1 = mu * m(t + dt);
    const auto k1 = rhs(c0, p);
    std::array<double, 6> tmp;
    for (int i = 0; i < 6; ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
    const auto k2 = rhs(cm, tmp);
    for (int i = 0; i < 6; ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
    const auto k3 = rhs(cm, tmp);
    for (int i = 0; i < 6; ++i) tmp[i] = p[i] + dt * k3[i];
    const auto k4 = rhs(c1, tmp);
    for (int i = 0; i < 6; ++i) p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = (s + 1) * dt;
    c0 = c1;
    if ((s + 1) % 64 == 0) {
      double big = 0.0;
      for (double v : p) big = std::max(big, std::abs(v));
      if (big > 0.0) for (double& v : p) v /= big;
    }
  }
  return p[1];
}

double eigen_shoot(const std::function<double(double)>& m, std::pair<double, double> bracket) {
  double lo = std::min(bracket.first, bracket.second);
  double hi = std::max(bracket.first, bracket.second);
  double dlo = shoot_determinant(m, lo);
  const double dhi = shoot_determinant(m, hi);
  if (!(dlo * dhi < 0.0)) {
    throw Error(ErrorKind::NoSignChange, "boundary determinant has no sign change on [" +
                                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  while (hi - lo >= 1e-10 * (1.0 + std::abs(0.5 * (lo + hi)))) {
    const double mid = 0.5 * (lo + hi);
    const double dm = shoot_determinant(m, mid);
    if (dm == 0.0) return mid;
    if ((dm < 0.0) == (dlo < 0.0)) {
      lo = mid;
      dlo = dm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::function<double(double)> cubic_interpolant(const SampledFn& f) {
  const std::vector<double> v(f.values().begin(), f.values().end());
  const double inv_h = static_cast<double>(f.grid().n_interior() + 1);
  return [v, inv_h](double t) {
    const double x = t * inv_h;
    const auto last = static_cast<long>(v.size()) - 1;
    long i0 = static_cast<long>(std::floor(x)) - 1;
    i0 = std::clamp(i0, 0L, last - 3);
    double acc = 0.0;
    for (long a = 0; a < 4; ++a) {
      double l = 1.0;
      for (long b = 0; b < 4; ++b) {
        if (b != a) l *= (x - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
      }
      acc += l * v[static_cast<std::size_t>(i0 + a)];
    }
    return acc;
  };
}

double eigen_shoot(const SampledFn& m, std::pair<double, double> bracket) {
  return eigen_shoot(cubic_interpolant(m), bracket);
}

NodalOrderReport order_by_nodal(const SpectrumResult& result) {
  NodalOrderReport report;
  auto scan = [&](const std::vector<EigenPair>& list) {
    for (const auto& p : list) {
      const NodalProfile prof = nodal_profile(p.phi);
      NodalOrderReport::Row row{p.k, p.nu, prof.count, prof.is_nodal && prof.anomalies.empty(), true};
      row.ok = row.count == p.k - 1 && row.all_simple;
      if (!row.ok) {
        report.violations.push_back("k=" + std::to_string(p.k) + (p.nu > 0 ? "+" : "-") +
                                    ": expected " + std::to_string(p.k - 1) + " simple zeros, found " +
                                    std::to_string(row.count) +
                                    (row.all_simple ? "" : " (non-simple zero present)"));
      }
      report.rows.push_back(row);
    }
  };
  scan(result.positive);
  scan(result.negative);
  return report;
}

ExtrapolatedSpectrum extrapolated_spectrum(const Weight& weight, int n_interior, int count_pos,
                                           int count_neg, bool verify_nodal) {
  const Grid coarse_grid(n_interior);
  const Grid fine_grid(2 * n_interior + 1);
  ExtrapolatedSpectrum out{
      eigen_pencil(weight.sample(coarse_grid), count_pos, count_neg, weight.id, verify_nodal),
      eigen_pencil(weight.sample(fine_grid), count_pos, count_neg, weight.id, verify_nodal), {}, {}};
  auto combine = [](const std::vector<EigenPair>& c, const std::vector<EigenPair>& f) {
    std::vector<double> v;
    for (std::size_t i = 0; i < std::min(c.size(), f.size()); ++i) {
      v.push_back((4.0 * f[i].mu - c[i].mu) / 3.0);
    }
    return v;
  };
  out.positive = combine(out.coarse.positive, out.fine.positive);
  out.negative = combine(out.coarse.negative, out.fine.negative);
  return out;
}

}  // namespace beamspec
