#include "beamspec/linops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "beamspec/error.hpp"

namespace beamspec {

void second_diff_inplace(std::span<double> v, double h) {
  const std::size_t n = v.size();
  const double inv_h2 = 1.0 / (h * h);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cur = v[i];
    const double next = i + 1 < n ? v[i + 1] : 0.0;
    v[i] = (2.0 * cur - prev - next) * inv_h2;
    prev = cur;
  }
}

void lambda_solve_inplace(std::span<double> v, double h) {
  // Thomas elimination for tridiag(-1, 2, -1) u = h^2 e.
  const std::size_t n = v.size();
  std::vector<double> c(n);
  const double h2 = h * h;
  double denom = 2.0;
  c[0] = -1.0 / denom;
  v[0] = v[0] * h2 / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = 2.0 + c[i - 1];
    c[i] = -1.0 / denom;
    v[i] = (v[i] * h2 + v[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) v[i] -= c[i] * v[i + 1];
}

SampledFn apply_second_diff(const SampledFn& u) {
  SampledFn w(u.grid());
  const double inv_h2 = 1.0 / (u.grid().h() * u.grid().h());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    w[i] = (2.0 * u[i] - u[i - 1] - u[i + 1]) * inv_h2;
  }
  return w;
}

SampledFn apply_stiffness(const SampledFn& u) { return apply_second_diff(apply_second_diff(u)); }

SampledFn lambda_solve(const SampledFn& e) {
  SampledFn u = e;
  u[0] = 0.0;
  u[u.size() - 1] = 0.0;
  lambda_solve_inplace(u.interior(), e.grid().h());
  return u;
}

SampledFn lambda2(const SampledFn& e) { return lambda_solve(lambda_solve(e)); }

SampledFn t_mu(const SampledFn& u, double mu, const SampledFn& m) {
  require_same_grid(u, m);
  SampledFn mu_m_u(u.grid());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) mu_m_u[i] = m[i] * u[i];
  SampledFn out = lambda2(mu_m_u);
  out *= mu;
  return out;
}

BandedLU stiffness_band(const Grid& grid, std::span<const double> shift) {
  const std::size_t n = static_cast<std::size_t>(grid.n_interior());
  const double inv_h4 = 1.0 / std::pow(grid.h(), 4);
  BandedLU k(n, 2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    // Row i of A*A with A = tridiag(-1,2,-1); the first and last rows lose one
    // neighbour term of the diagonal.
    const bool edge = (i == 0 || i + 1 == n);
    k.at(i, i) = (edge ? 5.0 : 6.0) * inv_h4 - shift[i];
    if (i + 1 < n) k.at(i, i + 1) = k.at(i + 1, i) = -4.0 * inv_h4;
    if (i + 2 < n) k.at(i, i + 2) = k.at(i + 2, i) = 1.0 * inv_h4;
  }
  return k;
}

int det_sign_psi(double mu, const SampledFn& m, std::span<const double> known_eigenvalues) {
  if (mu == 0.0) return 1;
  for (double ev : known_eigenvalues) {
    if (std::abs(mu - ev) <= 1e-8 * std::abs(mu)) {
      throw Error(ErrorKind::OnEigenvalue, "mu = " + std::to_string(mu) +
                                               " is within 1e-8 relative of eigenvalue " +
                                               std::to_string(ev));
    }
  }
  const std::size_t n = static_cast<std::size_t>(m.grid().n_interior());
  const double h = m.grid().h();
  Eigen::MatrixXd b(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = m[j + 1];
    lambda_solve_inplace(col, h);
    lambda_solve_inplace(col, h);
    for (std::size_t i = 0; i < n; ++i) b(i, j) = -mu * col[i];
    b(j, j) += 1.0;
  }
  const double max_entry = b.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  const auto& f = lu.matrixLU();
  int sign = static_cast<int>(std::lround(lu.permutationP().determinant()));
  for (std::size_t i = 0; i < n; ++i) {
    const double p = f(i, i);
    if (std::abs(p) < 1e-13 * max_entry) {
      throw Error(ErrorKind::OnEigenvalue,
                  "LU pivot collapsed at mu = " + std::to_string(mu) + "; mu is a pencil eigenvalue");
    }
    if (p < 0.0) sign = -sign;
  }
  return sign;
}

int det_sign_banded(double mu, const SampledFn& m) {
  std::vector<double> shift(static_cast<std::size_t>(m.grid().n_interior()));
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = mu * m[i + 1];
  BandedLU k = stiffness_band(m.grid(), shift);
  k.factor();
  return k.det_sign();
}

}  // namespace beamspec
