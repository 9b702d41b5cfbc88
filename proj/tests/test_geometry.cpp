#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ovalab/common.hpp"
#include "ovalab/geometry.hpp"
#include "ovalab/spectrum.hpp"
#include "test_support.hpp"

using namespace ovalab;

namespace {

std::vector<double> angles(std::size_t n, double (*f)(double)) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = f(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  return t;
}

HarmonicField field_from(std::size_t n, int dim, double (*f)(double, int)) {
  std::vector<double> v(n * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) v[i * dim + k] = f(kTwoPi * static_cast<double>(i) / static_cast<double>(n), k);
  return HarmonicField(dim, v);
}

double circle_psi(double s, int k) { return (k == 0 ? std::cos(s) : std::sin(s)) / std::sqrt(kTwoPi); }
double digon_psi(double s, int k) { return k == 0 ? std::sin(s) / std::sqrt(kPi) : 0.0; }

std::vector<double> vertex(const DiscreteCurve& c, std::size_t i) {
  auto v = c.vertices();
  return {v[2 * i], v[2 * i + 1]};
}

}  // namespace

TEST_CASE("tangent angle curves: closure of circle, segment and double circle") {
  auto circle = DiscreteCurve::planar(angles(1024, [](double s) { return s; }), kTwoPi);
  CHECK(circle.closure_defect() < 1e-6);
  CHECK(circle.closed());

  auto segment = DiscreteCurve::planar(angles(1024, [](double) { return 0.0; }), kTwoPi);
  CHECK(segment.closure_defect() == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK_FALSE(segment.closed());

  auto twice = DiscreteCurve::planar(angles(1024, [](double s) { return 2.0 * s; }), kTwoPi);
  CHECK(twice.closure_defect() < 1e-6);
}

TEST_CASE("curve construction rejects bad input") {
  CHECK_THROWS_AS(DiscreteCurve::planar(std::vector<double>(8, 0.0), kTwoPi), ValidationError);
  CHECK_THROWS_AS(DiscreteCurve::planar(std::vector<double>(64, 0.0), -1.0), ValidationError);
  std::vector<double> t(64, 0.0);
  t[3] = NAN;
  CHECK_THROWS_AS(DiscreteCurve::planar(t, kTwoPi), ValidationError);
  CHECK_THROWS_AS(DiscreteCurve::spatial(3, std::vector<double>(3 * 32, 1.0), kTwoPi), ValidationError);
}

TEST_CASE("closure projection") {
  auto closed = angles(512, [](double s) { return s; });
  auto p = project_to_closure(closed);
  for (std::size_t i = 0; i < closed.size(); ++i) CHECK(std::abs(p.theta[i] - closed[i]) < 1e-12);

  auto wobble = angles(512, [](double s) { return s + 0.05 * std::sin(s); });
  auto q = project_to_closure(wobble);
  CHECK(DiscreteCurve::planar(q.theta, kTwoPi).closure_defect() < 1e-10);
  CHECK(q.perturbation > 0.0);

  // a straight segment cannot be closed by a small correction
  std::vector<double> flat(512, 0.0);
  try {
    auto r = project_to_closure(flat);
    CHECK(r.perturbation > 1.0);
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("perturbation") != std::string::npos);
  }
}

TEST_CASE("curvature profiles") {
  auto circle = DiscreteCurve::planar(angles(1024, [](double s) { return s; }), kTwoPi);
  for (double k : curvature_profile(circle).kappa) CHECK(std::abs(k - 1.0) < 1e-4);

  auto twice = DiscreteCurve::planar(angles(1024, [](double s) { return 2.0 * s; }), kTwoPi);
  for (double k : curvature_profile(twice).kappa) CHECK(std::abs(k - 2.0) < 1e-4);

  // 2:1 ellipse before length normalization: a/b^2 = 2, b/a^2 = 1/4
  auto el = ellipse_curve(2.0, 1.0, 1024);
  auto k = curvature_profile(el).kappa;
  CHECK(*std::max_element(k.begin(), k.end()) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(*std::min_element(k.begin(), k.end()) == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("to_harmonic: circle and digon") {
  const std::size_t n = 1024;
  auto circle = make_named_curve("circle", {}, n);
  auto psi = to_harmonic(circle.curve, *circle.phi);
  for (std::size_t i = 0; i < n; i += 37) {
    double s = kTwoPi * i / n;
    CHECK(psi[i][0] == doctest::Approx(circle_psi(s, 0)).epsilon(1e-12));
    CHECK(psi[i][1] == doctest::Approx(circle_psi(s, 1)).epsilon(1e-12));
  }
  CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi.dirichlet_energy() == doctest::Approx(1.0).epsilon(1e-5));

  auto digon = make_named_curve("digon", {}, n);
  auto dpsi = to_harmonic(digon.curve, *digon.phi);
  for (std::size_t i = 0; i < n; i += 41) {
    CHECK(dpsi[i][0] == doctest::Approx(digon_psi(kTwoPi * i / n, 0)).epsilon(1e-12));
    CHECK(std::abs(dpsi[i][1]) < 1e-12);
  }
  CHECK(rayleigh_quotient_harmonic(dpsi) == doctest::Approx(1.0).epsilon(1e-5));

  auto zero = to_harmonic(circle.curve, std::vector<double>(n, 0.0));
  CHECK(zero.max_magnitude() == 0.0);
  CHECK(zero.dirichlet_energy() == 0.0);
  CHECK_FALSE(admissible(zero));

  CHECK_THROWS_AS(to_harmonic(circle.curve, std::vector<double>(n, -1.0)), ValidationError);
}

TEST_CASE("from_harmonic: circle, digon, constant field") {
  const std::size_t n = 1024;
  auto rec = from_harmonic(field_from(n, 2, circle_psi));
  CHECK(rec.curve.closed());
  CHECK(rec.curve.length() == doctest::Approx(kTwoPi));
  for (double p : rec.phi) CHECK(p == doctest::Approx(1.0 / std::sqrt(kTwoPi)).epsilon(1e-12));
  for (double k : curvature_profile(rec.curve).kappa) CHECK(std::abs(k - 1.0) < 1e-4);

  auto dig = from_harmonic(field_from(n, 2, digon_psi));
  CHECK(dig.curve.closed());
  CHECK(dig.zeros.intervals.size() == 2);
  for (std::size_t i = 0; i < n; ++i) {
    double s = kTwoPi * i / n;
    CHECK(dig.phi[i] == doctest::Approx(std::abs(std::sin(s)) / std::sqrt(kPi)).epsilon(1e-12));
  }
  // the tangent flips: theta is 0 on one run and pi on the other
  auto th = dig.curve.theta();
  CHECK(std::abs(std::remainder(th[n / 4], kTwoPi)) < 1e-12);
  CHECK(std::abs(std::remainder(th[3 * n / 4] - kPi, kTwoPi)) < 1e-12);

  auto constant = field_from(n, 2, [](double, int k) { return k == 0 ? 1.0 / std::sqrt(kTwoPi) : 0.0; });
  CHECK_FALSE(admissible(constant));
  CHECK_THROWS_AS(from_harmonic(constant), ValidationError);
}

TEST_CASE("zero sets") {
  const std::size_t n = 1024;
  const double h = kTwoPi / n;
  auto circle = zero_set(field_from(n, 2, circle_psi));
  CHECK(circle.measure == 0.0);
  CHECK(circle.intervals.empty());
  CHECK(std::abs(circle.residual) < 1e-12);

  auto dig = zero_set(field_from(n, 2, digon_psi), 1e-3);
  REQUIRE(dig.intervals.size() == 2);
  CHECK(dig.measure <= 4.0 * h + 2.0 * 1e-3 + 1e-12);
  CHECK(std::abs(dig.loop_integral[0]) < 1e-12);
  CHECK(std::abs(dig.loop_integral[1]) < 1e-12);

  // field vanishing on a run of grid length 1.0
  std::vector<double> v(2 * n, 0.0);
  std::size_t run = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = kTwoPi * i / n;
    if (s >= 2.0 && s < 3.0) {
      ++run;
      continue;
    }
    v[2 * i] = std::cos(s);
    v[2 * i + 1] = std::sin(s);
  }
  auto z = zero_set(HarmonicField(2, v));
  CHECK(std::abs(z.measure - 1.0) <= h);
  CHECK(z.measure == doctest::Approx(run * h));
  REQUIRE(z.intervals.size() == 1);
  CHECK(z.intervals[0].count == run);
}

TEST_CASE("double tangents") {
  auto circle = make_named_curve("circle", {}, 1024).curve;
  auto sc = double_tangent(circle);
  CHECK_FALSE(sc.tangent.has_value());
  CHECK(sc.monotone);
  CHECK(sc.total_turning == doctest::Approx(kTwoPi));

  auto ellipse = make_named_curve("ellipse", {}, 1024).curve;
  CHECK_FALSE(double_tangent(ellipse).tangent.has_value());

  auto peanut = make_named_curve("peanut", {}, 1024).curve;
  auto sp = double_tangent(peanut);
  REQUIRE(sp.tangent.has_value());
  CHECK_FALSE(sp.monotone);
  // dense direction scan oracle: both contact vertices maximize x.n
  const auto& t = *sp.tangent;
  auto verts = peanut.vertices();
  double best = -1e300, diam = 0.0;
  for (std::size_t i = 0; i < peanut.size(); ++i) {
    best = std::max(best, verts[2 * i] * t.line.normal[0] + verts[2 * i + 1] * t.line.normal[1]);
    for (std::size_t j = 0; j < i; j += 16)
      diam = std::max(diam, std::hypot(verts[2 * i] - verts[2 * j], verts[2 * i + 1] - verts[2 * j + 1]));
  }
  for (std::size_t v : {t.first_vertex, t.second_vertex}) {
    auto x = vertex(peanut, v);
    CHECK(std::abs(x[0] * t.line.normal[0] + x[1] * t.line.normal[1] - best) < 1e-6 * diam);
  }
  CHECK(t.second_vertex > t.first_vertex + 1);
  // a 10^4 direction scan finds the same support line
  auto fine = double_tangent(peanut, 10000);
  REQUIRE(fine.tangent.has_value());
  CHECK(std::abs(fine.tangent->line.normal[0] * t.line.normal[0] + fine.tangent->line.normal[1] * t.line.normal[1]) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chord reflection with phi vanishing at the joints is exact") {
  const std::size_t n = 1024;
  auto circle = make_named_curve("circle", {}, n);
  const std::size_t j = 100, k = 400;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = 1.0 + 0.3 * std::cos(kTwoPi * i / n);
  phi[j - 1] = 0.0;
  phi[k] = 0.0;
  const double before = rayleigh_quotient_curve(circle.curve, phi);

  auto a = vertex(circle.curve, j), b = vertex(circle.curve, k);
  double dx = b[0] - a[0], dy = b[1] - a[1], len = std::hypot(dx, dy);
  Mirror m{a, {-dy / len, dx / len}};
  auto refl = reflect_segment(circle.curve, j, k, m);
  CHECK(refl.closed());
  CHECK(std::abs(rayleigh_quotient_curve(refl, phi) - before) <= 1e-10 * before);
  // the reflected arc has the same |kappa| away from the joints
  auto k0 = curvature_profile(circle.curve).kappa, k1 = curvature_profile(refl).kappa;
  for (std::size_t i = j + 2; i + 2 < k; ++i) CHECK(k1[i] == doctest::Approx(k0[i]).epsilon(1e-9));

  CHECK_THROWS_AS(reflect_segment(circle.curve, j, j, m), ValidationError);
  Mirror off{{a[0] + 0.1, a[1]}, m.normal};
  CHECK_THROWS_AS(reflect_segment(circle.curve, j, k, off), ValidationError);
}

TEST_CASE("double tangent reflection with flat contacts is exact") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto rc = ovalab::testing::flat_contact_curve(seed, 1024);
    CHECK(rc.curve.closed());
    CHECK(std::abs(vertex(rc.curve, rc.second)[1] - rc.mirror.point[1]) < 1e-12);
    auto scan = double_tangent(rc.curve);
    REQUIRE(scan.tangent.has_value());
    auto e = curve_eigen(rc.curve);
    auto out = reflect_segment(rc.curve, rc.first, rc.second, rc.mirror);
    CHECK(out.closed());
    double rq0 = rayleigh_quotient_curve(rc.curve, e.phi);
    CHECK(std::abs(rayleigh_quotient_curve(out, e.phi) - rq0) <= 1e-10 * rq0);
  }
}

TEST_CASE("generic double tangent reflection: first order junction error") {
  // contacts at isolated vertices leave corners of size O(h) at the joints;
  // how the turning splits across the contact vertex varies with N
  for (std::size_t n : {1024u, 2048u, 4096u}) {
    auto peanut = make_named_curve("peanut", {}, n).curve;
    auto e = curve_eigen(peanut);
    auto t = double_tangent(peanut).tangent;
    REQUIRE(t.has_value());
    auto out = reflect_segment(peanut, t->first_vertex, t->second_vertex, t->line);
    CHECK(out.closed());
    double rq0 = rayleigh_quotient_curve(peanut, e.phi);
    double rel = std::abs(rayleigh_quotient_curve(out, e.phi) - rq0) / rq0;
    CHECK(rel > 1e-10);
    CHECK(rel < 0.1 * kTwoPi / static_cast<double>(n));
  }
}

TEST_CASE("named curve corpus") {
  for (auto name : {"circle", "digon", "ellipse", "peanut", "dshape", "point_symmetric_random", "random_closed"}) {
    CAPTURE(name);
    auto c = make_named_curve(name, {}, 512);
    CHECK(c.curve.closed());
    CHECK(c.curve.length() == doctest::Approx(kTwoPi));
  }
  auto dig = make_named_curve("digon", {}, 512).curve;
  auto th = dig.theta();
  CHECK(std::count(th.begin(), th.end(), 0.0) == 256);
  CHECK(std::count(th.begin(), th.end(), kPi) == 256);

  CurveParams p;
  p.seed = 7;
  auto sym = make_named_curve("point_symmetric_random", p, 1024).curve;
  auto ps = sym.theta();
  for (std::size_t i = 0; i < 512; ++i) CHECK(std::abs(std::remainder(ps[i + 512] - ps[i] - kPi, kTwoPi)) < 1e-12);

  CHECK_THROWS_AS(make_named_curve("spiral", {}, 512), ValidationError);
  CHECK_THROWS_AS(make_named_curve("circle", {}, 8), ValidationError);
}
