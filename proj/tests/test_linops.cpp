#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "beamspec/error.hpp"
#include "beamspec/linops.hpp"
#include "beamspec/weights.hpp"

using namespace beamspec;
constexpr double kPi = std::numbers::pi;

TEST_CASE("lambda_solve inverts the second difference") {
  const Grid g(50);
  const SampledFn e = SampledFn::sample(g, [](double t) { return std::exp(t) * std::cos(5 * t); });
  const SampledFn u = lambda_solve(e);
  CHECK(u[0] == 0.0);
  CHECK(u[u.size() - 1] == 0.0);
  const SampledFn back = apply_second_diff(u);
  for (std::size_t i = 1; i + 1 < u.size(); ++i) CHECK(back[i] == doctest::Approx(e[i]).epsilon(1e-10));
}

TEST_CASE("lambda2 of the stiffness action is the identity") {
  const Grid g(64);
  const SampledFn u = SampledFn::sample(g, [](double t) { return t * t * (1 - t) * std::sin(4 * t); });
  SampledFn v = u;
  v[0] = v[v.size() - 1] = 0.0;
  const SampledFn r = lambda2(apply_stiffness(v));
  for (std::size_t i = 1; i + 1 < v.size(); ++i) CHECK(r[i] == doctest::Approx(v[i]).epsilon(1e-9));
}

TEST_CASE("stiffness matches the square of the dense second difference") {
  const int n = 12;
  const Grid g(n);
  const double h2 = g.h() * g.h();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2 / h2;
    if (i > 0) a(i, i - 1) = -1 / h2;
    if (i + 1 < n) a(i, i + 1) = -1 / h2;
  }
  const Eigen::MatrixXd k = a * a;
  SampledFn u(g);
  for (int i = 1; i <= n; ++i) u[i] = std::cos(1.3 * i) + 0.1 * i;
  const SampledFn ku = apply_stiffness(u);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = u[i + 1];
  const Eigen::VectorXd y = k * x;
  for (int i = 0; i < n; ++i) CHECK(ku[i + 1] == doctest::Approx(y(i)).epsilon(1e-12));
}

TEST_CASE("sin(pi t) is an eigenvector of A with the discrete eigenvalue") {
  const Grid g(30);
  const SampledFn u = SampledFn::sample(g, [](double t) { return std::sin(kPi * t); });
  const double lam = 4.0 / (g.h() * g.h()) * std::pow(std::sin(kPi * g.h() / 2), 2);
  const SampledFn au = apply_second_diff(u);
  for (std::size_t i = 1; i + 1 < u.size(); ++i) CHECK(au[i] == doctest::Approx(lam * u[i]).epsilon(1e-11));
}

TEST_CASE("det_sign_psi matches the dense determinant") {
  const int n = 24;
  const Grid g(n);
  const SampledFn m = builtin_weight("cos2pi").sample(g);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const double h2 = g.h() * g.h();
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2 / h2;
    if (i > 0) a(i, i - 1) = -1 / h2;
    if (i + 1 < n) a(i, i + 1) = -1 / h2;
  }
  const Eigen::MatrixXd kinv = (a * a).inverse();
  Eigen::VectorXd md(n);
  for (int i = 0; i < n; ++i) md(i) = m[i + 1];
  for (double mu : {-9000.0, -300.0, 50.0, 700.0, 4000.0, 25000.0}) {
    const Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n) - mu * kinv * md.asDiagonal();
    const int expected = psi.determinant() > 0 ? 1 : -1;
    CHECK(det_sign_psi(mu, m) == expected);
    CHECK(det_sign_banded(mu, m) == expected);
  }
}

TEST_CASE("det_sign_psi refuses a known eigenvalue") {
  const SampledFn m = builtin_weight("one").sample(Grid(20));
  const std::vector<double> eig{500.0};
  CHECK_THROWS_AS(det_sign_psi(500.0 * (1 + 1e-10), m, eig), Error);
}

TEST_CASE("constant forcing reproduces t(1-t) exactly") {
  const Grid g(37);
  const SampledFn u = lambda_solve(SampledFn::sample(g, [](double) { return 2.0; }));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = g.node(i);
    CHECK(u[i] == doctest::Approx(t * (1 - t)).epsilon(1e-12));
  }
}

TEST_CASE("lambda2 recovers sin(pi t) at second order") {
  double prev = 0.0;
  for (int n : {99, 199}) {
    const Grid g(n);
    const double p4 = kPi * kPi * kPi * kPi;
    const SampledFn u = lambda2(SampledFn::sample(g, [p4](double t) { return p4 * std::sin(kPi * t); }));
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - std::sin(kPi * g.node(i))));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("lambda_solve matches a dense solve on random data") {
  const int n = 40;
  const Grid g(n);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  SampledFn e(g);
  for (int i = 1; i <= n; ++i) e[i] = z(rng);
  const double h2 = g.h() * g.h();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2 / h2;
    if (i > 0) a(i, i - 1) = -1 / h2;
    if (i + 1 < n) a(i, i + 1) = -1 / h2;
    rhs(i) = e[i + 1];
  }
  const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
  const Eigen::VectorXd x2 = a.partialPivLu().solve(x);
  const SampledFn u = lambda_solve(e);
  const SampledFn u2 = lambda2(e);
  const SampledFn twice = lambda_solve(lambda_solve(e));
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(u[i + 1] - x(i)) <= 1e-12 * x.cwiseAbs().maxCoeff());
    CHECK(std::abs(u2[i + 1] - x2(i)) <= 1e-10 * x2.cwiseAbs().maxCoeff());
    CHECK(u2[i + 1] == twice[i + 1]);
  }
}

TEST_CASE("t_mu scales lambda2 of the weighted function") {
  const Grid g(60);
  const SampledFn m = builtin_weight("sin3pi").sample(g);
  const SampledFn u = SampledFn::sample(g, [](double t) { return std::sin(7 * t) * t * (1 - t); });
  const SampledFn zero = t_mu(u, 0.0, m);
  CHECK(zero.max_abs() == 0.0);
  SampledFn mu(g);
  for (std::size_t i = 0; i < u.size(); ++i) mu[i] = m[i] * u[i];
  const SampledFn ref = 2.0 * lambda2(mu);
  const SampledFn got = t_mu(u, 2.0, m);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-14));
  const SampledFn one = builtin_weight("one").sample(Grid(400));
  const SampledFn s = SampledFn::sample(Grid(400), [](double t) { return std::sin(kPi * t); });
  const SampledFn fixed = t_mu(s, kPi * kPi * kPi * kPi, one);
  CHECK((fixed - s).max_abs() < 1e-4);
}

TEST_CASE("operators are symmetric") {
  const int n = 80;
  const Grid g(n);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  SampledFn x(g), y(g);
  for (int i = 1; i <= n; ++i) {
    x[i] = z(rng);
    y[i] = z(rng);
  }
  const double kxy = inner(apply_stiffness(x), y), xky = inner(x, apply_stiffness(y));
  CHECK(kxy == doctest::Approx(xky).epsilon(1e-12));
  const double axy = inner(apply_second_diff(x), y), xay = inner(x, apply_second_diff(y));
  CHECK(axy == doctest::Approx(xay).epsilon(1e-12));
}

TEST_CASE("lambda2 encodes all four boundary conditions") {
  const Grid g(500);
  const SampledFn e = SampledFn::sample(g, [](double t) { return 1.0 + std::cos(9 * t); });
  const SampledFn u = lambda2(e);
  CHECK(u[0] == 0.0);
  CHECK(u[u.size() - 1] == 0.0);
  const SampledFn d2 = derivative(u, 2);
  CHECK(std::abs(d2[0]) <= 10 * g.h() * g.h() * e.max_abs());
  CHECK(std::abs(d2[d2.size() - 1]) <= 10 * g.h() * g.h() * e.max_abs());
}

TEST_CASE("discrete maximum principle") {
  const Grid g(120);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    SampledFn e(g);
    for (std::size_t i = 1; i + 1 < e.size(); ++i) e[i] = u01(rng) < 0.9 ? 0.0 : u01(rng);
    e[1 + trial] = 1.0;
    const SampledFn u = lambda_solve(e);
    for (std::size_t i = 1; i + 1 < u.size(); ++i) CHECK(u[i] > 0.0);
  }
}

TEST_CASE("degree sign for the constant weight") {
  const SampledFn m = builtin_weight("one").sample(Grid(400));
  CHECK(det_sign_psi(0.0, m) == 1);
  CHECK(det_sign_psi(50.0, m) == 1);
  CHECK(det_sign_psi(500.0, m) == -1);
  CHECK(det_sign_psi(3000.0, m) == 1);
}
