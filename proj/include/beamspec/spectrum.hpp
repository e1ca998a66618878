#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "beamspec/grid.hpp"
#include "beamspec/weights.hpp"

namespace beamspec {

/// One eigenpair of u'''' = mu m u with simply-supported ends.
/// phi has e_norm 1 and is positive just right of t = 0.
struct EigenPair {
  int k = 0;
  int nu = +1;
  double mu = 0.0;
  SampledFn phi;
};

struct SpectrumResult {
  std::string weight_id;
  Grid grid;
  SampledFn weight;
  std::vector<EigenPair> positive;  // mu increasing
  std::vector<EigenPair> negative;  // mu decreasing
  bool no_negative_spectrum = false;
  std::vector<std::string> warnings;  // near-degenerate neighbours, etc.

  const EigenPair& pair(int k, int nu) const;
  std::vector<double> eigenvalues() const;
};

inline constexpr int kMaxEigenCount = 12;

/// Pencil eigenvalues via Lanczos on Lambda M Lambda (symmetric, applied in O(n)),
/// Ritz values from cyclic Jacobi. Pairs are indexed by magnitude; with verify_nodal
/// a zero count other than k-1 throws NodalMismatch, otherwise order_by_nodal reports it.
SpectrumResult eigen_pencil(const SampledFn& m, int count_pos, int count_neg,
                            std::string weight_id = "custom", bool verify_nodal = true);

/// Literal dense route: K = R^T R, S = R^{-T} M R^{-1}, cyclic Jacobi on S.
/// O(n^3); limited to n <= 400 and used to cross-check eigen_pencil.
SpectrumResult eigen_pencil_dense(const SampledFn& m, int count_pos, int count_neg,
                                  std::string weight_id = "custom", bool verify_nodal = true);

/// Boundary determinant d(mu) of the shooting problem; zero exactly at eigenvalues.
double shoot_determinant(const std::function<double(double)>& m, double mu);

/// Root of d(mu) inside the bracket by bisection to 1e-10 (1 + |mu|).
double eigen_shoot(const std::function<double(double)>& m, std::pair<double, double> bracket);
/// Sampled weight, evaluated between nodes by cubic Lagrange interpolation.
double eigen_shoot(const SampledFn& m, std::pair<double, double> bracket);

/// Cubic (4-point Lagrange) interpolant of a sampled function.
std::function<double(double)> cubic_interpolant(const SampledFn& f);

struct NodalOrderReport {
  struct Row {
    int k = 0;
    int nu = +1;
    int count = 0;
    bool all_simple = true;
    bool ok = true;
  };
  std::vector<Row> rows;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Recomputes every eigenfunction's nodal profile and checks count = k - 1.
NodalOrderReport order_by_nodal(const SpectrumResult& result);

/// Pencil values at n and 2n+1 interior nodes (h halved) and their Richardson
/// extrapolation (4 mu(h/2) - mu(h)) / 3.
struct ExtrapolatedSpectrum {
  SpectrumResult coarse;
  SpectrumResult fine;
  std::vector<double> positive;
  std::vector<double> negative;
};
ExtrapolatedSpectrum extrapolated_spectrum(const Weight& weight, int n_interior, int count_pos,
                                           int count_neg, bool verify_nodal = true);

}  // namespace beamspec
