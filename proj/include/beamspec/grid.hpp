#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace beamspec {

/// Uniform grid on [0,1] with n interior nodes; node i sits at i/(n+1).
class Grid {
 public:
  static constexpr int kMinInterior = 8;

  explicit Grid(int n_interior);

  int n_interior() const noexcept { return n_; }
  /// Total node count including both endpoints.
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) + 2; }
  double h() const noexcept { return h_; }
  double node(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(n_ + 1);
  }
  std::vector<double> nodes() const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_ == b.n_; }

 private:
  int n_;
  double h_;
};

Grid make_grid(int n_interior);

/// Values of a function on every node of a grid, endpoints included.
class SampledFn {
 public:
  explicit SampledFn(const Grid& grid);
  SampledFn(const Grid& grid, std::vector<double> values);

  static SampledFn sample(const Grid& grid, const std::function<double(double)>& f);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  /// Interior nodes 1..n only.
  std::span<const double> interior() const noexcept { return {values_.data() + 1, values_.size() - 2}; }
  std::span<double> interior() noexcept { return {values_.data() + 1, values_.size() - 2}; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double max_abs() const noexcept;
  /// Piecewise-linear interpolation at t in [0,1].
  double at(double t) const;

  SampledFn& operator+=(const SampledFn& other);
  SampledFn& operator-=(const SampledFn& other);
  SampledFn& operator*=(double c) noexcept;

 private:
  Grid grid_;
  std::vector<double> values_;
};

SampledFn operator+(SampledFn a, const SampledFn& b);
SampledFn operator-(SampledFn a, const SampledFn& b);
SampledFn operator*(double c, SampledFn a);
SampledFn operator-(SampledFn a);

/// Throws GridMismatch unless both functions live on the same grid.
void require_same_grid(const SampledFn& a, const SampledFn& b);

/// Second-order finite-difference derivative of order 1, 2 or 3.
/// Centered stencils inside, one-sided second-order stencils at the ends.
SampledFn derivative(const SampledFn& u, int order);

struct ENorm {
  double value = 0.0;
  double sup_u = 0.0;
  double sup_d1 = 0.0;
  double sup_d2 = 0.0;
  double sup_d3 = 0.0;
};

/// max|u| + max|u'| + max|u''| + max|u'''|, derivatives by derivative().
ENorm e_norm(const SampledFn& u);

/// Discrete L2 inner product h * sum over interior nodes.
double inner(const SampledFn& a, const SampledFn& b);

/// Two-column CSV with header "t,value", 17 significant digits.
void write_csv(std::ostream& out, const SampledFn& u);
std::string to_csv(const SampledFn& u);
/// Reads the CSV written by write_csv; node count must be a valid grid.
SampledFn read_csv(std::istream& in);

}  // namespace beamspec
