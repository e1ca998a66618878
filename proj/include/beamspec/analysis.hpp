#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamspec/grid.hpp"
#include "beamspec/spectrum.hpp"

namespace beamspec {

/// Worker count for fan-out: BEAMSPEC_THREADS if set and positive, else hardware concurrency.
int thread_budget();

struct ParityRow {
  double mu = 0.0;
  int det_sign = 0;
  int eigen_count_below = 0;
  int expected_sign = 0;
  bool match = false;
};

struct ParityReport {
  std::string weight_id;
  std::vector<ParityRow> rows;   // sorted by mu
  std::vector<double> skipped;   // too close to an eigenvalue or beyond the computed spectrum
  bool all_match() const;
};

/// Compares sign det(I - mu K^{-1} M) with (-1)^(number of eigenvalues strictly between 0 and mu).
/// Samples within 1e-6 relative of an eigenvalue, or past the last computed one on their side, are skipped.
ParityReport degree_parity_sweep(const SampledFn& m, const std::vector<double>& mu_samples,
                                 std::string weight_id = "custom");
ParityReport degree_parity_sweep(const SpectrumResult& spectrum, const std::vector<double>& mu_samples);

/// per_side log-spaced samples on each side, between |mu_1|/4 and the last computed eigenvalue.
/// A side without eigenvalues uses the magnitudes of the other side.
std::vector<double> parity_samples(const SpectrumResult& spectrum, int per_side);

struct SturmVerdict {
  bool pass = false;
  int zeros1 = 0;
  int zeros2 = 0;
  double residual1 = 0.0;  // max|u - Lambda^2(b u)| / e_norm(u)
  double residual2 = 0.0;
};

inline constexpr double kSturmResidual = 1e-6;

/// Requires b2 > b1 > 0 on interior nodes and u_i solving u'''' = b_i u; throws HypothesisViolated otherwise.
SturmVerdict sturm_check(const SampledFn& b1, const SampledFn& b2, const SampledFn& u1, const SampledFn& u2);

struct SturmCase {
  int k1 = 0;
  int k2 = 0;
  int zeros1 = 0;
  int zeros2 = 0;
  bool pass = false;
};

struct SturmSuiteReport {
  std::uint64_t seed = 0;
  int n = 0;
  std::vector<SturmCase> cases;
  int draws = 0;                     // weight pairs drawn, including rejected ones
  bool identical_control_rejected = false;  // u2 := u1
  bool swapped_control_rejected = false;    // b1 and b2 exchanged
  int passed() const;
};

/// Random positive weights m = exp(sum_j a_j sin(j pi t + p_j)), b_i = mu_{k_i}(m_i) m_i,
/// pairs kept only when b2 > b1 everywhere.
SturmSuiteReport sturm_suite(int pairs, std::uint64_t seed, int n_interior);

struct DivergenceReport {
  int side = +1;
  std::vector<int> counts;  // j = 1..j_max
  bool pass = false;        // counts[j-1] == j - 1
};

DivergenceReport divergence_check(const SampledFn& m, int side, int j_max);

struct SpacingRow {
  int j = 0;
  std::vector<double> gaps;
  double max_error = 0.0;
  bool pass = false;
};

struct SpacingReport {
  std::vector<SpacingRow> rows;
  bool pass = false;
};

inline constexpr double kSpacingTolerance = 1e-3;

SpacingReport spacing_check(int j_max, int n_interior = 2000);

}  // namespace beamspec
