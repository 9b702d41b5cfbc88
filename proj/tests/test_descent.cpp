#include <doctest.h>

#include <cmath>

#include "ovalab/common.hpp"
#include "ovalab/descent.hpp"
#include "ovalab/geometry.hpp"
#include "ovalab/spectrum.hpp"

using namespace ovalab;

namespace {

HarmonicField mode_field(std::size_t n, int k, double eps = 0.0, int k2 = 3) {
  std::vector<double> v(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    v[2 * i] = (std::cos(k * s) + eps * std::cos(k2 * s)) / std::sqrt(kTwoPi);
    v[2 * i + 1] = (std::sin(k * s) + eps * std::sin(k2 * s + 0.3)) / std::sqrt(kTwoPi);
  }
  return HarmonicField(2, v);
}

double mode_value(int k, std::size_t n) {
  double h = kTwoPi / static_cast<double>(n);
  return (2.0 - 2.0 * std::cos(k * h)) / (h * h);
}

double l2_norm(const std::vector<double>& g, double h) {
  double s = 0.0;
  for (double x : g) s += x * x;
  return std::sqrt(h * s);
}

// I - lambda (||psi||^2 - 1) - 2 mu . (h sum psi / |psi|); the factor 2
// matches psi'' + lambda psi + P mu / |psi| = 0 as the stationarity condition
double lagrangian(const HarmonicField& f, double lambda, const std::vector<double>& mu) {
  double l = f.dirichlet_energy() - lambda * (f.norm_squared() - 1.0);
  const double h = f.spacing();
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t k = 0; k < mu.size(); ++k) l -= 2.0 * mu[k] * h * f[i][k] / f.magnitude(i);
  return l;
}

HarmonicField shifted(const HarmonicField& f, const std::vector<double>& v, double t) {
  std::vector<double> s(f.samples().begin(), f.samples().end());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += t * v[i];
  return HarmonicField(f.dim(), s);
}

}  // namespace

TEST_CASE("multipliers on the mu = 0 family") {
  const std::size_t n = 1024;
  auto c = multipliers_and_residual(mode_field(n, 1));
  CHECK(c.lambda == doctest::Approx(mode_value(1, n)).epsilon(1e-10));
  CHECK(std::abs(c.mu[0]) < 1e-8);
  CHECK(std::abs(c.mu[1]) < 1e-8);
  CHECK(c.el_residual < 1e-8);

  auto two = multipliers_and_residual(mode_field(n, 2));
  CHECK(two.lambda == doctest::Approx(mode_value(2, n)).epsilon(1e-10));
  CHECK(std::abs(two.lambda - 4.0) < 1e-4);
  CHECK(std::abs(two.mu[0]) < 1e-8);
  CHECK(std::abs(two.mu[1]) < 1e-8);

  // regular field near the digon
  std::vector<double> v(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = kTwoPi * i / n;
    v[2 * i] = std::sin(s) / std::sqrt(kPi);
    v[2 * i + 1] = 0.05 * std::cos(s) / std::sqrt(kPi);
  }
  auto d = multipliers_and_residual(HarmonicField(2, v));
  CHECK(std::isfinite(d.lambda));
  CHECK(std::isfinite(d.mu[0]));
  CHECK(std::isfinite(d.el_residual));
  CHECK(d.el_residual > 0.0);
}

TEST_CASE("gradients") {
  const std::size_t n = 1024;
  const double h = kTwoPi / n;
  auto circle = mode_field(n, 1);
  CHECK(l2_norm(gradient(circle), h) < 1e-10);
  CHECK(l2_norm(gradient(circle, mode_value(1, n), {0.0, 0.0}), h) < 1e-10);

  // second harmonic with lambda = 1: a nonzero gradient; check it against
  // central differences of the Lagrangian
  auto f = mode_field(n, 2, 0.1, 5);
  const double lambda = 1.0;
  const std::vector<double> mu = {0.3, -0.2};
  auto g = gradient(f, lambda, mu);
  CHECK(l2_norm(g, h) > 1.0);
  SplitMix64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(2 * n);
    for (double& x : v) x = rng.normal();
    double analytic = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) analytic += h * g[i] * v[i];
    const double t = 1e-6;
    double fd = (lagrangian(shifted(f, v, t), lambda, mu) - lagrangian(shifted(f, v, -t), lambda, mu)) / (2 * t);
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
  }
  // stepping against it lowers the Lagrangian
  CHECK(lagrangian(shifted(f, g, -1e-4), lambda, mu) < lagrangian(f, lambda, mu));

  auto scaled = shifted(circle, std::vector<double>(circle.samples().begin(), circle.samples().end()), 1.0);
  CHECK_THROWS_AS(gradient(scaled), ValidationError);
  CHECK_THROWS_AS(gradient(circle, 1.0, {0.0}), ValidationError);
}

TEST_CASE("Rayleigh quotient gradient matches central differences") {
  const std::size_t n = 512;
  const double h = kTwoPi / n;
  auto f = mode_field(n, 1, 0.2, 3);
  auto g = rq_gradient(f);
  SplitMix64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(2 * n);
    for (double& x : v) x = rng.normal();
    double analytic = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) analytic += h * g[i] * v[i];
    const double t = 1e-6;
    double fd = (rayleigh_quotient_harmonic(shifted(f, v, t)) - rayleigh_quotient_harmonic(shifted(f, v, -t))) / (2 * t);
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
  }
}

TEST_CASE("constraint projection") {
  const std::size_t n = 1024;
  auto circle = mode_field(n, 1);
  auto same = project_constraints(circle);
  for (std::size_t i = 0; i < 2 * n; ++i) CHECK(std::abs(same.samples()[i] - circle.samples()[i]) < 1e-12);

  std::vector<double> v(circle.samples().begin(), circle.samples().end());
  for (std::size_t i = 0; i < n; ++i) {
    v[2 * i] += 0.05;
    v[2 * i + 1] -= 0.02;
  }
  HarmonicField moved(2, v);
  CHECK(loop_residual(moved) > 1e-3);
  auto p = project_constraints(moved);
  CHECK(loop_residual(p) < 1e-10);
  CHECK(p.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));

  HarmonicField constant(2, [&] {
    std::vector<double> c(2 * n);
    for (std::size_t i = 0; i < n; ++i) c[2 * i] = 1.0;
    return c;
  }());
  CHECK_THROWS_AS(project_constraints(constant), NumericalError);
  CHECK_THROWS_AS(project_constraints(HarmonicField(2, std::vector<double>(2 * n, 0.0))), ValidationError);
}

TEST_CASE("descent from the circle stops at once") {
  auto r = minimize(mode_field(1024, 1));
  CHECK(r.verdict == DescentVerdict::converged);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].el_residual < 1e-8);
  CHECK(r.trace[0].lambda_est == doctest::Approx(mode_value(1, 1024)).epsilon(1e-10));

  // lambda_est reaches 1 to 1e-8 only once h^2/12 < 1e-8
  auto fine = minimize(mode_field(32768, 1));
  CHECK(fine.verdict == DescentVerdict::converged);
  CHECK(std::abs(fine.trace.back().lambda_est - 1.0) < 1e-8);
}

TEST_CASE("descent from perturbed circles") {
  for (double eps : {0.01, 0.1}) {
    CAPTURE(eps);
    auto r = minimize(mode_field(512, 1, eps, 3));
    CHECK(r.verdict == DescentVerdict::converged);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].rq <= r.trace[i - 1].rq);
    CHECK(r.trace.back().rq <= r.trace.front().rq);
    CHECK(r.trace.back().el_residual < 1e-6);
    CHECK(r.trace.back().loop_residual < 1e-10);
    CHECK(r.field.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
  }

  // an unnormalized start is projected first
  auto big = mode_field(512, 1, 0.01, 3);
  auto big3 = shifted(big, std::vector<double>(big.samples().begin(), big.samples().end()), 2.0);
  auto r = minimize(big3);
  CHECK(r.verdict == DescentVerdict::converged);
  CHECK(r.trace.front().rq == doctest::Approx(rayleigh_quotient_harmonic(big)).epsilon(1e-8));
}

TEST_CASE("descent input checks") {
  DescentOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(minimize(mode_field(256, 1), bad), ValidationError);
  std::vector<double> v(2 * 256, 0.0);
  for (std::size_t i = 0; i < 256; ++i) v[2 * i] = std::sin(kTwoPi * i / 256);
  CHECK_THROWS_AS(minimize(HarmonicField(2, v)), ValidationError);
  CHECK(to_string(DescentVerdict::zero_set_approach) == "zero_set_approach");
}
