#pragma once

#include <cstddef>
#include <vector>

#include "ovalab/common.hpp"
#include "ovalab/elflow.hpp"
#include "ovalab/geometry.hpp"

namespace ovalab {

struct SplineCoeffs {
  double k2 = 0.0;
  double k3 = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double m = 0.0;

  double y(double x) const { return k2 * x * x + k3 * x * x * x; }
  double dy(double x) const { return 2.0 * k2 * x + 3.0 * k3 * x * x; }
  double d2y(double x) const { return 2.0 * k2 + 6.0 * k3 * x; }
};

/// y = k2 x^2 + k3 x^3 with y(0) = y'(0) = 0, y(x0) = y0, y'(x0) = m.
SplineCoeffs spline_coefficients(double x0, double y0, double m);

/// Signed curvature y'' / (1 + y'^2)^{3/2}.
double spline_curvature(const SplineCoeffs& k, double x);

/// max |curvature| on [0, x0]: dense sampling plus golden-section refinement.
double spline_curvature_bound(const SplineCoeffs& k, double x0);

/// Arclength of the spline graph over [0, x0].
double spline_length(const SplineCoeffs& k);

/// integral of curvature^2 ds over the spline.
double spline_bending(const SplineCoeffs& k);

/// Convex arc of length ell in (pi, 2 pi) from (0, 0) to (ell - 2 pi, 0)
/// with theta(0) = 0, theta(ell) = 2 pi and singular ends
/// theta ~ (A/c) s^c, R ~ a s. Closed by a straight segment of length
/// 2 pi - ell. The curve is symmetric: theta(ell - s) = 2 pi - theta(s).
///
/// theta' = A s^{c-1} W(s) + K [beta (1 - W(s)) + g(s)], W a smooth cutoff
/// equal to 1 on [0, s1] and 0 beyond s2, g a pair of Gaussian bumps
/// centred at xi and ell - xi. K fixes theta(ell/2) = pi and xi is solved
/// from the closure condition.
class DShape {
 public:
  DShape(const SingularData& singular, double ell);

  const SingularData& singular() const { return sd_; }
  double ell() const { return ell_; }
  double segment_length() const { return kTwoPi - ell_; }
  double s1() const { return s1_; }
  double s2() const { return s2_; }
  double bump_center() const { return xi_; }

  double theta(double s) const;    // s in [0, ell]
  double thetap(double s) const;
  double R(double s) const;
  /// x(s) - x(0) for s in [0, s1] (exact series region) by quadrature.
  std::vector<double> start_chord(double s) const;
  /// x(ell) - x(ell - s) for s in [0, s1].
  std::vector<double> end_chord(double s) const;
  /// integral of R^2 over the arc.
  double r_mass() const;

  /// Full closed curve (arc then segment) on N samples over length 2 pi,
  /// with R on the arc and 0 on the segment.
  NamedCurve discretize(std::size_t n) const;

 private:
  double window(double s) const;   // W
  double base(double s) const;     // beta (1 - W) + g, without K
  double thetap_half(double s) const;
  double theta_half(double s) const;   // s in [0, ell/2]
  void build_table();
  double closure(double xi);

  SingularData sd_;
  double ell_;
  double half_;
  double s1_ = 0.0, s2_ = 0.0;
  double beta_ = 0.05;
  double width_ = 0.0;
  double xi_ = 0.0;
  double K_ = 0.0;
  double r_plateau_ = 0.0;
  std::vector<double> table_;   // theta on a uniform grid of [s1, ell/2]
  double dt_ = 0.0;
};

struct DShapeConfig {
  DShape shape;
  NamedCurve curve;   // arc + segment on the N grid, phi = R
  std::size_t n = 0;
};

/// Validates c in (0, 1/2], a, A > 0, ell in (pi, 2 pi) and builds the shape.
DShapeConfig build_dshape(const SingularData& singular, double ell, std::size_t n);

struct SurgeryReport {
  double sigma = 0.0;
  double sigma_prime = 0.0;
  double rq_before = 0.0;
  double rq_after = 0.0;
  double length_factor = 0.0;     // (L~ / 2 pi)^2
  double new_length = 0.0;
  double length_defect = 0.0;     // |spline length - sigma|, start end
  double bending = 0.0;           // integral kappa~^2 R0^2 ds, start end
  double curvature_bound = 0.0;   // max |kappa~| on the start spline
  double r0 = 0.0;
  double predicted_slope = 0.0;   // 2 a^2 / integral R^2
};

struct SurgeryResult {
  DiscreteCurve curve;            // rescaled to length 2 pi
  std::vector<double> phi;
  SurgeryReport report;
};

SurgeryResult spline_surgery(const DShapeConfig& config, double sigma);

struct SlopeFit {
  double intercept = 0.0;
  double slope_b = 0.0;           // rq_after ~ intercept - b sigma
  double r_squared = 0.0;
  double predicted = 0.0;         // 2 a^2 / integral R^2
  double ratio = 0.0;             // b / predicted
};

SlopeFit fit_decrease_slope(const std::vector<SurgeryReport>& reports);

/// Least-squares exponent p of y ~ C x^p.
double fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ovalab
