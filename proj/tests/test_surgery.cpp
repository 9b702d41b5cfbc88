#include <doctest.h>

#include <cmath>

#include "ovalab/common.hpp"
#include "ovalab/spectrum.hpp"
#include "ovalab/surgery.hpp"

using namespace ovalab;

TEST_CASE("spline coefficients") {
  auto a = spline_coefficients(1.0, 1.0, 0.0);
  CHECK(a.k2 == doctest::Approx(3.0));
  CHECK(a.k3 == doctest::Approx(-2.0));
  auto b = spline_coefficients(1.0, 0.0, 1.0);
  CHECK(b.k2 == doctest::Approx(-1.0));
  CHECK(b.k3 == doctest::Approx(1.0));
  auto c = spline_coefficients(2.0, 1.0, 1.0);
  CHECK(c.k2 == doctest::Approx(0.25));
  CHECK(std::abs(c.k3) < 1e-15);
  for (const auto& k : {a, b, c}) {
    CHECK(k.y(0.0) == 0.0);
    CHECK(k.dy(0.0) == 0.0);
    CHECK(k.y(k.x0) == doctest::Approx(k.y0));
    CHECK(k.dy(k.x0) == doctest::Approx(k.m));
  }
  CHECK_THROWS_AS(spline_coefficients(0.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(spline_coefficients(-1.0, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(spline_coefficients(1.0, NAN, 0.0), ValidationError);
}

TEST_CASE("spline curvature, length and bending") {
  auto a = spline_coefficients(1.0, 1.0, 0.0);
  // y'' = 6 at x = 0 where y' = 0
  CHECK(spline_curvature(a, 0.0) == doctest::Approx(6.0));
  CHECK(spline_curvature_bound(a, 1.0) == doctest::Approx(6.0).epsilon(1e-8));

  auto flat = spline_coefficients(1.5, 0.0, 0.0);
  CHECK(spline_curvature_bound(flat, 1.5) == 0.0);
  CHECK(spline_length(flat) == doctest::Approx(1.5));
  CHECK(spline_bending(flat) == 0.0);

  // y = x^2 / 4 on [0, 2]: length sqrt(2) + asinh(1)
  auto p = spline_coefficients(2.0, 1.0, 1.0);
  CHECK(spline_length(p) == doctest::Approx(std::sqrt(2.0) + std::asinh(1.0)).epsilon(1e-12));
  CHECK(spline_bending(p) > 0.0);
}

TEST_CASE("D-shape configuration") {
  auto cfg = build_dshape(make_singular_data(1.0, 0.6, 0.4, 1.0), 5.0, 8192);
  const auto& d = cfg.shape;
  CHECK(d.theta(0.0) == doctest::Approx(0.0));
  CHECK(d.theta(d.ell()) == doctest::Approx(kTwoPi));
  CHECK(d.theta(0.5 * d.ell()) == doctest::Approx(kPi));
  CHECK(d.theta(0.01) == doctest::Approx(1.5 * std::pow(0.01, 0.4)).epsilon(1e-10));
  // symmetry and convexity
  for (double s : {0.1, 0.7, 1.3, 2.2}) {
    CHECK(d.theta(d.ell() - s) == doctest::Approx(kTwoPi - d.theta(s)).epsilon(1e-10));
    CHECK(d.thetap(s) > 0.0);
    CHECK(d.R(s) > 0.0);
  }
  CHECK(cfg.curve.curve.closure_defect() < 1e-10);
  CHECK(cfg.curve.curve.length() == doctest::Approx(kTwoPi));
  CHECK(d.r_mass() > 0.0);

  CHECK_THROWS_AS(build_dshape(make_singular_data(1.0, 0.6, 0.6, 1.0), 5.0, 1024), ValidationError);
  CHECK_NOTHROW(build_dshape(make_singular_data(1.0, 0.35, 0.5, 1.0), 5.0, 1024));
  CHECK_THROWS_AS(build_dshape(make_singular_data(1.0, 0.6, 0.4, 1.0), 7.0, 1024), ValidationError);
  CHECK_THROWS_AS(build_dshape(make_singular_data(1.0, 0.6, 0.4, 1.0), 3.0, 1024), ValidationError);
}

TEST_CASE("surgery lowers the quotient") {
  auto cfg = build_dshape(make_singular_data(1.0, 0.6, 0.4, 1.0), 5.0, 8192);
  auto r = spline_surgery(cfg, 0.02);
  CHECK(r.report.rq_before == doctest::Approx(rayleigh_quotient_curve(cfg.curve.curve, *cfg.curve.phi)));
  CHECK(r.report.rq_after < r.report.rq_before);
  CHECK(r.report.sigma_prime > 0.0);
  CHECK(r.curve.length() == doctest::Approx(kTwoPi));
  CHECK(r.curve.closure_defect() < 1e-10);
  CHECK(r.phi.size() == r.curve.size());

  CHECK_THROWS_AS(spline_surgery(cfg, 0.0), ValidationError);
  CHECK_THROWS_AS(spline_surgery(cfg, 1.0), ValidationError);
}

TEST_CASE("surgery scaling in sigma") {
  const double c = 0.4;
  auto cfg = build_dshape(make_singular_data(1.0, 0.35, c, 1.0), 5.0, 32768);
  std::vector<SurgeryReport> reports;
  std::vector<double> sig, defect, bend, bound;
  for (double s : {0.04, 0.02, 0.01, 0.005}) {
    reports.push_back(spline_surgery(cfg, s).report);
    sig.push_back(s);
    defect.push_back(reports.back().length_defect);
    bend.push_back(reports.back().bending);
    bound.push_back(reports.back().curvature_bound);
  }
  CHECK(std::abs(fit_power_law(sig, bound) - (c - 1.0)) < 0.1);
  CHECK(std::abs(fit_power_law(sig, defect) - (2 * c + 1)) < 0.15);
  CHECK(std::abs(fit_power_law(sig, bend) - (2 * c + 1)) < 0.15);

  auto fit = fit_decrease_slope(reports);
  CHECK(fit.slope_b > 0.0);
  CHECK(fit.r_squared > 0.99);
  CHECK(fit.ratio >= 0.5);
  CHECK(fit.ratio <= 1.5);
}

TEST_CASE("fits") {
  std::vector<SurgeryReport> lin(4);
  double s[] = {0.04, 0.02, 0.01, 0.005};
  for (int i = 0; i < 4; ++i) {
    lin[i].sigma = s[i];
    lin[i].rq_after = 0.9 - 1.7 * s[i];
    lin[i].predicted_slope = 2.0;
  }
  auto f = fit_decrease_slope(lin);
  CHECK(f.slope_b == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.ratio == doctest::Approx(0.85));
  lin.resize(2);
  CHECK_THROWS_AS(fit_decrease_slope(lin), ValidationError);

  CHECK(fit_power_law({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0).epsilon(1e-12));
}
