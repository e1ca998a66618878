#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamspec/nodal.hpp"
#include "beamspec/spectrum.hpp"
#include "beamspec/weights.hpp"
#include "oracles.hpp"

using namespace beamspec;
constexpr double kPi = std::numbers::pi;

TEST_CASE("zeros of sin(k pi t)") {
  const Grid g(2000);
  const auto z2 = find_zeros(SampledFn::sample(g, [](double t) { return std::sin(2 * kPi * t); }));
  REQUIRE(z2.size() == 1);
  CHECK(z2[0] == doctest::Approx(0.5).epsilon(1e-6));
  const auto z3 = find_zeros(SampledFn::sample(g, [](double t) { return std::sin(3 * kPi * t); }));
  REQUIRE(z3.size() == 2);
  CHECK(std::abs(z3[0] - 1.0 / 3.0) <= 1e-6);
  CHECK(std::abs(z3[1] - 2.0 / 3.0) <= 1e-6);
}

TEST_CASE("zeros of the fourth constant-weight eigenfunction") {
  const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(Grid(2000)), 4, 0, "one");
  const auto z = find_zeros(s.pair(4, 1).phi);
  REQUIRE(z.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(z[i] - 0.25 * (i + 1)) <= 1e-4);
}

TEST_CASE("zero classification") {
  const Grid g(2000);
  const SampledFn s2 = SampledFn::sample(g, [](double t) { return std::sin(2 * kPi * t); });
  const ZeroRecord a = classify_zero(s2, 0.5);
  CHECK(a.kind == ZeroKind::GeneralizedSimple);
  CHECK(a.d1 == doctest::Approx(-2 * kPi).epsilon(1e-4));

  const SampledFn quartic = SampledFn::sample(g, [](double t) {
    const double b = t * (1 - t);
    return b * b * std::pow(t - 0.5, 4);
  });
  CHECK(classify_zero(quartic, 0.5).kind == ZeroKind::GeneralizedDouble);

  const SampledFn cubic = SampledFn::sample(g, [](double t) {
    const double b = t * (1 - t);
    return b * b * std::pow(t - 0.5, 3);
  });
  const ZeroRecord c = classify_zero(cubic, 0.5);
  CHECK(c.kind == ZeroKind::GeneralizedSimple);
  CHECK(c.d3 == doctest::Approx(6 * 0.0625).epsilon(1e-3));
}

TEST_CASE("nodal profiles of simple functions") {
  const Grid g(1000);
  const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(g), 1, 0, "one");
  const NodalProfile p1 = nodal_profile(s.pair(1, 1).phi);
  CHECK(p1.count == 0);
  CHECK(p1.sigma == 1);
  CHECK(p1.is_nodal);

  const NodalProfile p2 = nodal_profile(SampledFn::sample(g, [](double t) { return -std::sin(2 * kPi * t); }));
  CHECK(p2.count == 1);
  CHECK(p2.sigma == -1);
  CHECK(sign_near_origin(SampledFn::sample(g, [](double t) { return -std::sin(2 * kPi * t); })) == -1);

  const SampledFn quartic = SampledFn::sample(g, [](double t) {
    const double b = t * (1 - t);
    return b * b * std::pow(t - 0.5, 4);
  });
  const NodalProfile pq = nodal_profile(quartic);
  CHECK_FALSE(pq.is_nodal);
}

TEST_CASE("third eigenfunction for sin(3 pi t) is nodal with two zeros" * doctest::should_fail()) {
  const SpectrumResult s = eigen_pencil(builtin_weight("sin3pi").sample(Grid(2000)), 3, 0, "sin3pi", false);
  const NodalProfile p = nodal_profile(s.pair(3, 1).phi);
  CHECK(p.is_nodal);
  CHECK(p.count == 2);
}

TEST_CASE("nodal profile is scale invariant") {
  const Grid g(800);
  for (const std::string name : {"one", "sin3pi", "cos2pi", "linear_ramp"}) {
    const SampledFn m = builtin_weight(name).sample(g);
    const auto in = m.interior();
    const bool neg = *std::min_element(in.begin(), in.end()) < 0.0;
    const SpectrumResult s = eigen_pencil(m, 4, neg ? 4 : 0, name, false);
    for (const auto* list : {&s.positive, &s.negative}) {
      for (const auto& p : *list) {
        const NodalProfile base = nodal_profile(p.phi);
        for (double c : {3.7, 1e-3, -2.0, -0.05}) {
          const NodalProfile q = nodal_profile(c * p.phi);
          CHECK(q.count == base.count);
          CHECK(q.sigma == (c > 0 ? base.sigma : -base.sigma));
          REQUIRE(q.zeros.size() == base.zeros.size());
          for (std::size_t i = 0; i < q.zeros.size(); ++i) CHECK(q.zeros[i].kind == base.zeros[i].kind);
        }
      }
    }
  }
}

TEST_CASE("find_zeros returns k - 1 records for constant-weight eigenfunctions") {
  const SpectrumResult s = eigen_pencil(builtin_weight("one").sample(Grid(2000)), 8, 0, "one");
  for (const auto& p : s.positive) CHECK(find_zeros(p.phi).size() == static_cast<std::size_t>(p.k - 1));
}

TEST_CASE("zero count agrees with raw sign changes on random trigonometric sums") {
  const Grid g(1500);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    double c[5];
    for (double& x : c) x = a(rng);
    const SampledFn u = SampledFn::sample(g, [&](double t) {
      double s = 0.0;
      for (int j = 0; j < 5; ++j) s += c[j] * std::sin((j + 1) * kPi * t);
      return s;
    });
    const auto v = u.values();
    const int changes = oracle::sign_changes(std::vector<double>(v.begin(), v.end()));
    CHECK(static_cast<int>(find_zeros(u).size()) >= changes);
  }
}
