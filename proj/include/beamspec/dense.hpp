#pragma once

#include <cstddef>
#include <vector>

namespace beamspec {

/// Row-major dense square matrix; just enough for the small symmetric problems here.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) noexcept { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[i * n + j]; }
};

struct SymmetricEigen {
  std::vector<double> values;  // unsorted, in diagonal order
  DenseMatrix vectors;         // column j belongs to values[j]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// rel_tol times the Frobenius norm of the input.
SymmetricEigen jacobi_eigen(DenseMatrix a, double rel_tol = 1e-12, int max_sweeps = 100);

/// Lower-triangular L with A = L L^T; throws InvariantViolation if A is not SPD.
DenseMatrix cholesky(const DenseMatrix& a);

}  // namespace beamspec
