#include "beamspec/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "beamspec/error.hpp"
#include "beamspec/linops.hpp"

namespace beamspec {

namespace {

constexpr double kPi = std::numbers::pi;

double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double central_diff(const std::function<double(double)>& f, double x) {
  const double step = 1e-6 * (1.0 + std::abs(x));
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

double max_abs(std::span<const double> v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

}  // namespace

PerturbationG builtin_perturbation(const std::string& name, const Params& params) {
  if (name == "none") {
    return {"none", [](double, double, double) { return 0.0; },
            [](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; }};
  }
  if (name == "cubic") {
    const double c = param(params, "c", 1.0);
    return {"cubic", [c](double, double s, double) { return c * s * s * s; },
            [c](double, double s, double) { return 3.0 * c * s * s; },
            [](double, double, double) { return 0.0; }};
  }
  throw Error(ErrorKind::Usage, "unknown perturbation '" + name + "'");
}

std::vector<std::string> builtin_perturbation_names() { return {"none", "cubic"}; }

PerturbationG manufactured_perturbation(std::function<double(double)> m) {
  const double p4 = kPi * kPi * kPi * kPi;
  return {"manufactured",
          [m, p4](double t, double s, double mu) { return p4 * std::sin(kPi * t) - mu * m(t) * s; },
          [m](double t, double, double mu) { return -mu * m(t); },
          [m](double t, double s, double) { return -m(t) * s; }};
}

PerturbationG reduction_perturbation(const AsymptoticF& f) {
  auto fn = f.f;
  const double f0 = f.f0;
  auto deriv = f.derivative;
  PerturbationG g{"reduction:" + f.name, [fn, f0](double, double s, double mu) { return mu * (fn(s) - f0 * s); },
                  {}, [fn, f0](double, double s, double) { return fn(s) - f0 * s; }};
  if (deriv) g.d_s = [deriv, f0](double, double s, double mu) { return mu * (deriv(s) - f0); };
  return g;
}

AsymptoticF builtin_asymptotic(const std::string& name, const Params& params) {
  const double f0 = param(params, "f0", 1.0);
  const double finf = param(params, "finf", 2.0);
  if (name == "linear") {
    const double c = param(params, "c", 1.0);
    return {"linear", [c](double s) { return c * s; }, c, c, [c](double) { return c; }};
  }
  if (name == "saturating") {
    return {"saturating",
            [f0, finf](double s) { return s * (finf - (finf - f0) / (1.0 + s * s)); }, f0, finf,
            [f0, finf](double s) {
              const double q = 1.0 + s * s;
              return finf - (finf - f0) / q + 2.0 * (finf - f0) * s * s / (q * q);
            }};
  }
  if (name == "atan") {
    return {"atan", [f0, finf](double s) { return finf * s + (f0 - finf) * std::atan(s); }, f0, finf,
            [f0, finf](double s) { return finf + (f0 - finf) / (1.0 + s * s); }};
  }
  if (name == "gaussian") {
    return {"gaussian", [](double s) { return s * std::exp(-s * s); }, f0, finf,
            [](double s) { return (1.0 - 2.0 * s * s) * std::exp(-s * s); }};
  }
  throw Error(ErrorKind::Usage, "unknown nonlinearity '" + name + "'");
}

std::vector<std::string> builtin_asymptotic_names() { return {"linear", "saturating", "atan", "gaussian"}; }

AsymptoticF tabulated_asymptotic(std::string name, std::vector<double> s, std::vector<double> fs) {
  if (s.size() != fs.size() || s.size() < 3) {
    throw Error(ErrorKind::Usage, "nonlinearity table needs at least three (s, f) rows");
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!(s[i] < s[i + 1])) throw Error(ErrorKind::Usage, "nonlinearity table: s must increase strictly");
  }
  const auto zero = std::find(s.begin(), s.end(), 0.0);
  if (zero == s.end() || fs[static_cast<std::size_t>(zero - s.begin())] != 0.0 || zero == s.begin() ||
      zero + 1 == s.end()) {
    throw Error(ErrorKind::Usage, "nonlinearity table must contain (0, 0) with rows on both sides");
  }
  const std::size_t z = static_cast<std::size_t>(zero - s.begin());
  const double slope_left = fs[z - 1] / s[z - 1];
  const double slope_right = fs[z + 1] / s[z + 1];
  const double ratio_lo = fs.front() / s.front();
  const double ratio_hi = fs.back() / s.back();

  auto segment = [s](double x) {
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t j = static_cast<std::size_t>(it - s.begin());
    j = std::clamp<std::size_t>(j, 1, s.size() - 1);
    return j - 1;
  };
  auto f = [s, fs, ratio_lo, ratio_hi, segment](double x) {
    if (x <= s.front()) return ratio_lo * x;
    if (x >= s.back()) return ratio_hi * x;
    const std::size_t j = segment(x);
    const double w = (x - s[j]) / (s[j + 1] - s[j]);
    return (1.0 - w) * fs[j] + w * fs[j + 1];
  };
  auto df = [s, fs, ratio_lo, ratio_hi, segment](double x) {
    if (x <= s.front()) return ratio_lo;
    if (x >= s.back()) return ratio_hi;
    const std::size_t j = segment(x);
    return (fs[j + 1] - fs[j]) / (s[j + 1] - s[j]);
  };
  return {std::move(name), f, 0.5 * (slope_left + slope_right), 0.5 * (ratio_lo + ratio_hi), df};
}

AsymptoticF read_asymptotic_csv(std::istream& in, std::string name) {
  std::vector<double> s, fs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) {
      if (s.empty()) continue;  // header
      throw Error(ErrorKind::Usage, "malformed nonlinearity table row: " + line);
    }
    s.push_back(a);
    fs.push_back(b);
  }
  return tabulated_asymptotic(std::move(name), std::move(s), std::move(fs));
}

Linearization linearize(const ProblemSpec& spec, const SampledFn& u, double mu) {
  require_same_grid(spec.m, u);
  const std::size_t n = static_cast<std::size_t>(u.grid().n_interior());
  Linearization lin{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  const auto m = spec.m.interior();
  const auto v = u.interior();
  if (const auto* p = std::get_if<Perturbed>(&spec.kind)) {
    const auto& g = p->g;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = u.grid().node(i + 1);
      const double s = v[i];
      const double gs = g.d_s ? g.d_s(t, s, mu)
                              : central_diff([&](double x) { return g.evaluate(t, x, mu); }, s);
      const double gm = g.d_mu ? g.d_mu(t, s, mu)
                               : central_diff([&](double x) { return g.evaluate(t, s, x); }, mu);
      lin.value[i] = mu * m[i] * s + g.evaluate(t, s, mu);
      lin.d_s[i] = mu * m[i] + gs;
      lin.d_mu[i] = m[i] * s + gm;
    }
  } else {
    const auto& a = std::get<Autonomous>(spec.kind);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = v[i];
      const double fv = a.f.f(s);
      const double fd = a.f.derivative ? a.f.derivative(s) : central_diff(a.f.f, s);
      lin.value[i] = mu * a.gamma * m[i] * fv;
      lin.d_s[i] = mu * a.gamma * m[i] * fd;
      lin.d_mu[i] = a.gamma * m[i] * fv;
    }
  }
  return lin;
}

std::vector<double> nonlinear_term(const ProblemSpec& spec, const SampledFn& u, double mu) {
  require_same_grid(spec.m, u);
  const std::size_t n = static_cast<std::size_t>(u.grid().n_interior());
  std::vector<double> out(n);
  const auto m = spec.m.interior();
  const auto v = u.interior();
  if (const auto* p = std::get_if<Perturbed>(&spec.kind)) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = mu * m[i] * v[i] + p->g.evaluate(u.grid().node(i + 1), v[i], mu);
    }
  } else {
    const auto& a = std::get<Autonomous>(spec.kind);
    for (std::size_t i = 0; i < n; ++i) out[i] = mu * a.gamma * m[i] * a.f.f(v[i]);
  }
  return out;
}

void check_boundary(const SampledFn& u) {
  const double e = e_norm(u).value;
  if (e == 0.0) return;
  const double h = u.grid().h();
  const std::size_t last = u.size() - 1;
  if (std::abs(u[0]) > 1e-10 * e || std::abs(u[last]) > 1e-10 * e) {
    throw Error(ErrorKind::BoundaryViolation, "u does not vanish at the endpoints");
  }
  const SampledFn d2 = derivative(u, 2);
  if (std::abs(d2[0]) > 1e2 * h * h * e || std::abs(d2[last]) > 1e2 * h * h * e) {
    throw Error(ErrorKind::BoundaryViolation, "u'' does not vanish at the endpoints");
  }
}

ResidualReport residual(const SampledFn& u, double mu, const ProblemSpec& spec) {
  check_boundary(u);
  const std::vector<double> nl = nonlinear_term(spec, u, mu);
  ResidualReport r{0.0, SampledFn(u.grid()), apply_stiffness(u), 0.0};
  auto fp = r.fixed_point.interior();
  std::copy(nl.begin(), nl.end(), fp.begin());
  const double h = u.grid().h();
  lambda_solve_inplace(fp, h);
  lambda_solve_inplace(fp, h);
  const auto v = u.interior();
  auto st = r.strong.interior();
  for (std::size_t i = 0; i < fp.size(); ++i) {
    fp[i] = v[i] - fp[i];
    st[i] -= nl[i];
  }
  r.max_norm = max_abs(fp);
  r.strong_max = max_abs(st);
  return r;
}

SmallOReport check_small_o(const PerturbationG& g, double mu_lo, double mu_hi) {
  SmallOReport rep;
  for (int e = 1; e <= 6; ++e) {
    const double s = std::pow(10.0, -e);
    double r = 0.0;
    for (int it = 0; it <= 32; ++it) {
      const double t = it / 32.0;
      for (int im = 0; im <= 8; ++im) {
        const double mu = mu_lo + (mu_hi - mu_lo) * im / 8.0;
        r = std::max({r, std::abs(g.evaluate(t, s, mu)) / s, std::abs(g.evaluate(t, -s, mu)) / s});
      }
    }
    rep.s_values.push_back(s);
    rep.ratios.push_back(r);
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < rep.ratios.size(); ++i) {
    if (rep.ratios[i + 1] > rep.ratios[i] * (1.0 + 1e-12) + 1e-300) monotone = false;
  }
  rep.passes = monotone && rep.ratios.back() < 1e-3 * rep.ratios.front() + 1e-12;
  return rep;
}

AsymptoticsReport estimate_asymptotics(const AsymptoticF& f) {
  AsymptoticsReport rep;
  auto ratio = [&](double s) { return 0.5 * (f.f(s) / s + f.f(-s) / (-s)); };
  rep.f0_hat = ratio(1e-7);
  rep.finf_hat = ratio(1e6);
  rep.h1_ok = true;
  for (int i = 0; i <= 260; ++i) {
    const double s = std::pow(10.0, -7.0 + 13.0 * i / 260.0);
    if (!(f.f(s) * s > 0.0) || !(f.f(-s) * (-s) > 0.0)) rep.h1_ok = false;
  }
  return rep;
}

AsymptoticsReport check_asymptotics(const AsymptoticF& f) {
  const AsymptoticsReport rep = estimate_asymptotics(f);
  auto close = [](double hat, double declared) {
    return declared > 0.0 && std::isfinite(declared) && hat > 0.0 &&
           std::abs(hat - declared) <= 1e-3 * declared;
  };
  if (!close(rep.f0_hat, f.f0) || !close(rep.finf_hat, f.finf)) {
    std::ostringstream msg;
    msg << "f '" << f.name << "': estimated f0 = " << rep.f0_hat << ", finf = " << rep.finf_hat
        << "; declared " << f.f0 << ", " << f.finf;
    throw Error(ErrorKind::AsymptoticMismatch, msg.str());
  }
  return rep;
}

FixedPointJacobian::FixedPointJacobian(const Grid& grid, std::vector<double> d)
    : grid_(grid), d_(std::move(d)), lu_(stiffness_band(grid, d_)) {
  lu_.factor();
}

void FixedPointJacobian::solve(std::span<double> b) const {
  // (I - Lambda^2 D) x = b  <=>  x = b + y,  (K - D) y = D b.
  std::vector<double> y(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) y[i] = d_[i] * b[i];
  lu_.solve(y);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += y[i];
}

std::vector<double> FixedPointJacobian::apply(std::span<const double> x) const {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = d_[i] * x[i];
  lambda_solve_inplace(y, grid_.h());
  lambda_solve_inplace(y, grid_.h());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - y[i];
  return y;
}

double FixedPointJacobian::singular_floor() const {
  // Resolution of solves through K - D: eps ||K|| relative to the size of D.
  const double h2 = grid_.h() * grid_.h();
  double dmax = 0.0;
  for (double v : d_) dmax = std::max(dmax, std::abs(v));
  if (dmax == 0.0) return kSingularThreshold;
  // ||Lambda^2 D|| <= dmax / lambda_min(K) < 1/2 keeps G_u = I - Lambda^2 D well away from singular.
  const double lam = 4.0 / h2 * std::pow(std::sin(std::numbers::pi * grid_.h() / 2.0), 2);
  if (dmax < 0.5 * lam * lam) return kSingularThreshold;
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * 16.0 / (h2 * h2) / dmax;
  return std::max(kSingularThreshold, floor);
}

double FixedPointJacobian::smallest_singular(int iterations) const {
  const std::size_t n = d_.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i));
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    nx = std::sqrt(nx);
    for (double& v : x) v /= nx;
    solve(x);
    double ny = 0.0;
    for (double v : x) ny += v * v;
    ny = std::sqrt(ny);
    if (!std::isfinite(ny) || ny == 0.0) return 0.0;
    estimate = 1.0 / ny;
  }
  return estimate;
}

NewtonResult newton_solve(const SampledFn& u0, double mu, const ProblemSpec& spec, double tol) {
  require_same_grid(spec.m, u0);
  check_boundary(u0);
  if (tol <= 0.0) tol = 1e-10 * (1.0 + e_norm(u0).value);
  NewtonResult res{u0, 0, {}};
  res.u[0] = 0.0;
  res.u[res.u.size() - 1] = 0.0;
  ResidualReport r = residual(res.u, mu, spec);
  for (int it = 0;; ++it) {
    res.history.push_back(r.max_norm);
    const Linearization lin = linearize(spec, res.u, mu);
    const FixedPointJacobian jac(spec.grid(), lin.d_s);
    const double sigma = jac.smallest_singular();
    if (sigma < jac.singular_floor()) {
      throw Error(ErrorKind::SingularJacobian,
                  "Jacobian is singular at mu = " + std::to_string(mu) + "; perturb mu");
    }
    if (r.max_norm <= tol) return res;
    if (it == kNewtonMaxIterations) break;
    std::vector<double> delta(r.fixed_point.interior().begin(), r.fixed_point.interior().end());
    for (double& v : delta) v = -v;
    jac.solve(delta);
    double alpha = 1.0;
    for (;;) {
      SampledFn trial = res.u;
      auto ti = trial.interior();
      for (std::size_t i = 0; i < ti.size(); ++i) ti[i] += alpha * delta[i];
      ResidualReport rt = residual(trial, mu, spec);
      if (rt.max_norm <= (1.0 - 1e-4 * alpha) * r.max_norm || alpha <= 1.0 / 65536.0) {
        res.u = std::move(trial);
        r = std::move(rt);
        break;
      }
      alpha *= 0.5;
    }
    res.iterations = it + 1;
  }
  throw Error(ErrorKind::NoConvergence, "Newton did not converge in " +
                                            std::to_string(kNewtonMaxIterations) + " iterations (residual " +
                                            std::to_string(r.max_norm) + ")");
}

SampledFn newton(const SampledFn& u0, double mu, const ProblemSpec& spec, double tol) {
  return newton_solve(u0, mu, spec, tol).u;
}

}  // namespace beamspec
