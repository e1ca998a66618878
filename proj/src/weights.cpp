#include "beamspec/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "beamspec/error.hpp"

namespace beamspec {

using std::numbers::pi;

Weight builtin_weight(const std::string& name) {
  if (name == "one") return {name, [](double) { return 1.0; }};
  if (name == "sin3pi") return {name, [](double t) { return std::sin(3.0 * pi * t); }};
  if (name == "cos2pi") return {name, [](double t) { return std::cos(2.0 * pi * t); }};
  if (name == "linear_ramp") return {name, [](double t) { return 1.0 - 2.0 * t; }};
  throw Error(ErrorKind::Usage, "unknown builtin weight '" + name + "'");
}

std::vector<std::string> builtin_weight_names() { return {"one", "sin3pi", "cos2pi", "linear_ramp"}; }

Weight tabulated_weight(std::string id, std::vector<double> t, std::vector<double> values) {
  if (t.size() != values.size() || t.size() < 2) {
    throw Error(ErrorKind::Usage, "weight table needs matching t and value columns");
  }
  if (!std::is_sorted(t.begin(), t.end()) || t.front() > 0.0 || t.back() < 1.0) {
    throw Error(ErrorKind::Usage, "weight table nodes must increase and cover [0,1]");
  }
  auto eval = [t = std::move(t), v = std::move(values)](double x) {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return v.front();
    if (it == t.end()) return v.back();
    const auto j = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[j - 1]) / (t[j] - t[j - 1]);
    return (1.0 - w) * v[j - 1] + w * v[j];
  };
  return {std::move(id), std::move(eval)};
}

}  // namespace beamspec
