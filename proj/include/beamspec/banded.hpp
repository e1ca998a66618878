#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace beamspec {

/// Square band matrix with kl sub- and ku super-diagonals, factored in place by
/// Gaussian elimination with partial pivoting (LAPACK gbtrf layout, unblocked).
class BandedLU {
 public:
  BandedLU(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t n() const noexcept { return n_; }

  /// Entry (i,j) of the unfactored matrix; |i-j| must lie inside the band.
  double& at(std::size_t i, std::size_t j) noexcept { return data_[i * width_ + (j + kl_ - i)]; }
  double at(std::size_t i, std::size_t j) const noexcept { return data_[i * width_ + (j + kl_ - i)]; }

  void factor();
  bool factored() const noexcept { return factored_; }

  /// Smallest |pivot| seen during factor() and the largest matrix entry before it.
  double min_pivot() const noexcept { return min_pivot_; }
  double max_entry() const noexcept { return max_entry_; }
  /// Sign of the determinant (+1/-1), 0 if an exact zero pivot occurred.
  int det_sign() const noexcept { return det_sign_; }

  /// Overwrites b with the solution of A x = b.
  void solve(std::span<double> b) const;

 private:
  std::size_t n_, kl_, ku_, width_;
  std::vector<double> data_;
  std::vector<std::size_t> piv_;
  bool factored_ = false;
  double min_pivot_ = 0.0;
  double max_entry_ = 0.0;
  int det_sign_ = 1;
};

}  // namespace beamspec
