#include "beamspec/dense.hpp"

#include <cmath>

#include "beamspec/error.hpp"

namespace beamspec {

namespace {

double off_norm2(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t j = 0; j < a.n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return s;
}

}  // namespace

SymmetricEigen jacobi_eigen(DenseMatrix a, double rel_tol, int max_sweeps) {
  const std::size_t n = a.n;
  SymmetricEigen out;
  out.vectors = DenseMatrix(n);
  for (std::size_t i = 0; i < n; ++i) out.vectors(i, i) = 1.0;

  double frob2 = 0.0;
  for (double v : a.a) frob2 += v * v;
  const double target2 = rel_tol * rel_tol * frob2;

  DenseMatrix& v = out.vectors;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm2(a) <= target2) break;
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations already below roundoff of the diagonal pair.
        if (std::abs(apq) < 1e-300 ||
            (std::abs(app) + std::abs(apq) * 1e18 == std::abs(app) &&
             std::abs(aqq) + std::abs(apq) * 1e18 == std::abs(aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  return out;
}

DenseMatrix cholesky(const DenseMatrix& a) {
  const std::size_t n = a.n;
  DenseMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw Error(ErrorKind::InvariantViolation, "matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace beamspec
