#include "beamspec/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace beamspec {

BandedLU::BandedLU(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(n * (2 * kl + ku + 1), 0.0),
      piv_(n, 0) {}

void BandedLU::factor() {
  max_entry_ = 0.0;
  for (double v : data_) max_entry_ = std::max(max_entry_, std::abs(v));
  min_pivot_ = std::numeric_limits<double>::infinity();
  det_sign_ = 1;
  const std::size_t fill = ku_ + kl_;
  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t row_end = std::min(n_ - 1, k + kl_);
    const std::size_t col_end = std::min(n_ - 1, k + fill);
    std::size_t p = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i <= row_end; ++i) {
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        p = i;
      }
    }
    piv_[k] = p;
    if (p != k) {
      det_sign_ = -det_sign_;
      for (std::size_t j = k; j <= col_end; ++j) std::swap(at(k, j), at(p, j));
    }
    double pivot = at(k, k);
    min_pivot_ = std::min(min_pivot_, std::abs(pivot));
    if (pivot == 0.0) {
      det_sign_ = 0;
      pivot = at(k, k) = std::numeric_limits<double>::epsilon() * std::max(max_entry_, 1.0);
    } else if (pivot < 0.0) {
      det_sign_ = -det_sign_;
    }
    for (std::size_t i = k + 1; i <= row_end; ++i) {
      const double l = at(i, k) / pivot;
      at(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j <= col_end; ++j) at(i, j) -= l * at(k, j);
    }
  }
  factored_ = true;
}

void BandedLU::solve(std::span<double> b) const {
  const std::size_t fill = ku_ + kl_;
  for (std::size_t k = 0; k < n_; ++k) {
    if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    const std::size_t row_end = std::min(n_ - 1, k + kl_);
    for (std::size_t i = k + 1; i <= row_end; ++i) b[i] -= at(i, k) * b[k];
  }
  for (std::size_t kk = n_; kk-- > 0;) {
    const std::size_t col_end = std::min(n_ - 1, kk + fill);
    double s = b[kk];
    for (std::size_t j = kk + 1; j <= col_end; ++j) s -= at(kk, j) * b[j];
    b[kk] = s / at(kk, kk);
  }
}

}  // namespace beamspec
