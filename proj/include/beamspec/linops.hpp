#pragma once

#include <span>
#include <vector>

#include "beamspec/banded.hpp"
#include "beamspec/grid.hpp"

namespace beamspec {

// Discrete operators on the interior nodes of a grid.
//
//   A = (1/h^2) tridiag(-1, 2, -1)   encodes -u'' with u(0) = u(1) = 0
//   K = A A                          encodes u'''' with u = u'' = 0 at both ends
//   M = diag(m(t_i))                 weight
//
// Lambda = A^{-1} is the solution operator of -u'' = e, u(0) = u(1) = 0.

/// A u on interior nodes; endpoint slots of the result are zero.
SampledFn apply_second_diff(const SampledFn& u);
/// K u = A (A u); the intermediate -u'' vanishes at the endpoints.
SampledFn apply_stiffness(const SampledFn& u);

/// Interior-vector kernels (length n_interior) used by the solvers.
void second_diff_inplace(std::span<double> v, double h);
void lambda_solve_inplace(std::span<double> v, double h);

/// Lambda(e): u(0) = u(1) = 0, interior second differences equal e. O(n) Thomas sweep.
SampledFn lambda_solve(const SampledFn& e);
/// Lambda(Lambda(e)).
SampledFn lambda2(const SampledFn& e);
/// mu * Lambda^2(m u).
SampledFn t_mu(const SampledFn& u, double mu, const SampledFn& m);

/// Pentadiagonal K - diag(shift) in band storage, unfactored.
BandedLU stiffness_band(const Grid& grid, std::span<const double> shift);

/// Sign of det(I - mu K^{-1} M) by dense LU with partial pivoting.
/// When known_eigenvalues is non-empty, mu closer than 1e-8|mu| to one of them
/// is rejected with OnEigenvalue; a pivot below 1e-13 * max|entry| is also
/// reported as OnEigenvalue.
int det_sign_psi(double mu, const SampledFn& m, std::span<const double> known_eigenvalues = {});

/// Same sign computed from the banded LU of K - mu M (det K > 0).
int det_sign_banded(double mu, const SampledFn& m);

}  // namespace beamspec
