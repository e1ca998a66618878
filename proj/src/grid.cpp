#include "beamspec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "beamspec/error.hpp"

namespace beamspec {

Grid::Grid(int n_interior) : n_(n_interior), h_(1.0 / static_cast<double>(n_interior + 1)) {
  if (n_interior < kMinInterior) {
    throw Error(ErrorKind::TooCoarse,
                "grid needs at least " + std::to_string(kMinInterior) + " interior nodes, got " +
                    std::to_string(n_interior));
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> t(size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = node(i);
  return t;
}

Grid make_grid(int n_interior) { return Grid(n_interior); }

SampledFn::SampledFn(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

SampledFn::SampledFn(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorKind::GridMismatch, "sample count " + std::to_string(values_.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvariantViolation, "non-finite sample");
  }
}

SampledFn SampledFn::sample(const Grid& grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
  return SampledFn(grid, std::move(v));
}

double SampledFn::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SampledFn::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::OutOfDomain, "t outside [0,1]");
  const double x = t * static_cast<double>(grid_.n_interior() + 1);
  auto i = static_cast<std::size_t>(std::floor(x));
  if (i >= values_.size() - 1) i = values_.size() - 2;
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

void require_same_grid(const SampledFn& a, const SampledFn& b) {
  if (!(a.grid() == b.grid())) {
    throw Error(ErrorKind::GridMismatch, "functions sampled on grids with " +
                                             std::to_string(a.grid().n_interior()) + " and " +
                                             std::to_string(b.grid().n_interior()) +
                                             " interior nodes");
  }
}

SampledFn& SampledFn::operator+=(const SampledFn& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SampledFn& SampledFn::operator-=(const SampledFn& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SampledFn& SampledFn::operator*=(double c) noexcept {
  for (double& v : values_) v *= c;
  return *this;
}

SampledFn operator+(SampledFn a, const SampledFn& b) { return a += b; }
SampledFn operator-(SampledFn a, const SampledFn& b) { return a -= b; }
SampledFn operator*(double c, SampledFn a) { return a *= c; }
SampledFn operator-(SampledFn a) { return a *= -1.0; }

SampledFn derivative(const SampledFn& u, int order) {
  const auto v = u.values();
  const std::size_t last = v.size() - 1;
  const double h = u.grid().h();
  std::vector<double> d(v.size());
  switch (order) {
    case 1: {
      d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
      for (std::size_t i = 1; i < last; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
      d[last] = (3.0 * v[last] - 4.0 * v[last - 1] + v[last - 2]) / (2.0 * h);
      break;
    }
    case 2: {
      const double h2 = h * h;
      d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
      for (std::size_t i = 1; i < last; ++i) d[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
      d[last] = (2.0 * v[last] - 5.0 * v[last - 1] + 4.0 * v[last - 2] - v[last - 3]) / h2;
      break;
    }
    case 3: {
      const double h3 = 2.0 * h * h * h;
      auto forward = [&](std::size_t i) {
        return (-5.0 * v[i] + 18.0 * v[i + 1] - 24.0 * v[i + 2] + 14.0 * v[i + 3] - 3.0 * v[i + 4]) / h3;
      };
      auto backward = [&](std::size_t i) {
        return (5.0 * v[i] - 18.0 * v[i - 1] + 24.0 * v[i - 2] - 14.0 * v[i - 3] + 3.0 * v[i - 4]) / h3;
      };
      d[0] = forward(0);
      d[1] = forward(1);
      for (std::size_t i = 2; i + 2 <= last; ++i) {
        d[i] = (v[i + 2] - 2.0 * v[i + 1] + 2.0 * v[i - 1] - v[i - 2]) / h3;
      }
      d[last - 1] = backward(last - 1);
      d[last] = backward(last);
      break;
    }
    default:
      throw Error(ErrorKind::OutOfDomain, "derivative order must be 1, 2 or 3");
  }
  return SampledFn(u.grid(), std::move(d));
}

ENorm e_norm(const SampledFn& u) {
  ENorm n;
  n.sup_u = u.max_abs();
  n.sup_d1 = derivative(u, 1).max_abs();
  n.sup_d2 = derivative(u, 2).max_abs();
  n.sup_d3 = derivative(u, 3).max_abs();
  n.value = n.sup_u + n.sup_d1 + n.sup_d2 + n.sup_d3;
  return n;
}

double inner(const SampledFn& a, const SampledFn& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().h();
}

void write_csv(std::ostream& out, const SampledFn& u) {
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u.grid().node(i), u[i]);
    out << buf;
  }
}

std::string to_csv(const SampledFn& u) {
  std::ostringstream s;
  write_csv(s, u);
  return s.str();
}

SampledFn read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,value", 0) != 0) {
    throw Error(ErrorKind::Usage, "expected CSV header 't,value'");
  }
  std::vector<double> t;
  std::vector<double> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Usage, "malformed CSV row: " + line);
    t.push_back(std::stod(line.substr(0, comma)));
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  if (t.size() < 2) throw Error(ErrorKind::Usage, "CSV has too few rows");
  Grid grid(static_cast<int>(t.size()) - 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - grid.node(i)) > 1e-12) {
      throw Error(ErrorKind::GridMismatch, "CSV nodes are not a uniform grid on [0,1]");
    }
  }
  return SampledFn(grid, std::move(v));
}

}  // namespace beamspec
