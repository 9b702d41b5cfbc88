#include "ovalab/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ovalab/quadrature.hpp"
#include "ovalab/spectrum.hpp"

namespace ovalab {

namespace {

constexpr int kTableCells = 4000;

// C-infinity step from 0 (x <= 0) to 1 (x >= 1)
double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

// cumulative arclength table of a spline graph, inverted by Newton
struct SplineArc {
  SplineCoeffs k;
  std::vector<double> cum;
  double dx = 0.0;

  explicit SplineArc(const SplineCoeffs& coeffs, int cells = 256) : k(coeffs), cum(cells + 1, 0.0) {
    dx = k.x0 / cells;
    auto speed = [&](double x) { return std::sqrt(1.0 + k.dy(x) * k.dy(x)); };
    for (int i = 0; i < cells; ++i) cum[i + 1] = cum[i] + gauss5(speed, i * dx, (i + 1) * dx);
  }
  double length() const { return cum.back(); }
  double x_at(double u) const {
    auto speed = [&](double x) { return std::sqrt(1.0 + k.dy(x) * k.dy(x)); };
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - cum.begin()) - 1));
    i = std::min(i, cum.size() - 2);
    double x0 = dx * static_cast<double>(i);
    double x = x0 + dx * (u - cum[i]) / (cum[i + 1] - cum[i]);
    for (int it2 = 0; it2 < 30; ++it2) {
      double g = cum[i] + gauss5(speed, x0, x) - u;
      double step = g / speed(x);
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return x;
  }
};

}  // namespace

// Spline -----------------------------------------------------------------

SplineCoeffs spline_coefficients(double x0, double y0, double m) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw ValidationError("spline needs x0 > 0");
  if (!std::isfinite(y0) || !std::isfinite(m)) throw ValidationError("spline data must be finite");
  SplineCoeffs k;
  k.x0 = x0;
  k.y0 = y0;
  k.m = m;
  k.k2 = (3.0 * y0 - m * x0) / (x0 * x0);
  k.k3 = (m * x0 - 2.0 * y0) / (x0 * x0 * x0);
  return k;
}

double spline_curvature(const SplineCoeffs& k, double x) {
  double d = k.dy(x);
  return k.d2y(x) / std::pow(1.0 + d * d, 1.5);
}

double spline_curvature_bound(const SplineCoeffs& k, double x0) {
  if (!(x0 > 0.0)) throw ValidationError("curvature bound needs x0 > 0");
  const int samples = 2000;
  const double dx = x0 / samples;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i <= samples; ++i) {
    double v = std::abs(spline_curvature(k, i * dx));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  // golden-section refinement on the bracketing cells
  double lo = std::max(0.0, (best - 1) * dx), hi = std::min(x0, (best + 1) * dx);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double x) { return std::abs(spline_curvature(k, x)); };
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * x0; ++it) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = f(b);
    }
  }
  return std::max({best_val, fa, fb, f(0.0), f(x0)});
}

double spline_length(const SplineCoeffs& k) {
  return gauss5_composite([&](double x) { return std::sqrt(1.0 + k.dy(x) * k.dy(x)); }, 0.0, k.x0, 64);
}

double spline_bending(const SplineCoeffs& k) {
  return gauss5_composite(
      [&](double x) {
        double d = k.dy(x);
        return k.d2y(x) * k.d2y(x) / std::pow(1.0 + d * d, 2.5);
      },
      0.0, k.x0, 64);
}

// D-shape ------------------------------------------------------------------

DShape::DShape(const SingularData& singular, double ell) : sd_(singular), ell_(ell), half_(0.5 * ell) {
  const double a = sd_.a, A = sd_.A, c = sd_.c;
  if (!(a > 0.0) || !(A > 0.0)) throw ValidationError("D-shape needs a > 0 and A > 0");
  if (!(c > 0.0 && c <= 0.5)) throw ValidationError("D-shape exponent c must lie in (0, 1/2]");
  if (!(ell > kPi && ell < kTwoPi)) throw ValidationError("D-shape arc length must lie in (pi, 2 pi)");

  // The series window ends before the singular part has turned by pi/2.
  s2_ = std::min({0.25 * half_, std::pow(0.5 * kPi * c / A, 1.0 / c), 0.4});
  s1_ = 0.5 * s2_;
  r_plateau_ = a * s2_ + a * A * A / (2.0 * c * (2.0 * c + 1.0)) * std::pow(s2_, 2.0 * c + 1.0) -
               sd_.lambda * a / 6.0 * s2_ * s2_ * s2_;
  if (!(r_plateau_ > 0.0)) throw ValidationError("R series is not positive on the series window");

  // Try a few bridge shapes; for each, scan the bump centre for a sign
  // change of the closure residual and bisect.
  for (double width : {0.35, 0.25, 0.5, 0.15}) {
    for (double beta : {0.05, 0.3}) {
      width_ = width * half_;
      beta_ = beta;
      const int scan = 40;
      double lo = s2_, flo = closure(lo);
      for (int j = 1; j <= scan; ++j) {
        double hi = s2_ + (half_ - s2_) * j / scan;
        double fhi = closure(hi);
        if (std::isfinite(flo) && std::isfinite(fhi) && flo * fhi <= 0.0) {
          for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = closure(mid);
            if ((fm <= 0.0) == (flo <= 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          closure(0.5 * (lo + hi));
          return;
        }
        lo = hi;
        flo = fhi;
      }
    }
  }
  std::ostringstream msg;
  msg << "D-shape infeasible: no convex bridge closes the arc (c = " << c << ", A = " << A
      << ", ell = " << ell << ")";
  throw NumericalError(msg.str());
}

double DShape::window(double s) const {
  if (s <= s1_) return 1.0;
  if (s >= s2_) return 0.0;
  return 1.0 - smoothstep((s - s1_) / (s2_ - s1_));
}

double DShape::base(double s) const {
  const double cut = 1.0 - window(s);
  const double g = std::exp(-std::pow((s - xi_) / width_, 2)) +
                   std::exp(-std::pow((2.0 * half_ - s - xi_) / width_, 2));
  return beta_ * cut + cut * g;
}

double DShape::thetap_half(double s) const {
  double sing = sd_.A * std::pow(s, sd_.c - 1.0) * window(s);
  return sing + K_ * base(s);
}

void DShape::build_table() {
  dt_ = (half_ - s1_) / kTableCells;
  table_.assign(kTableCells + 1, 0.0);
  table_[0] = sd_.A / sd_.c * std::pow(s1_, sd_.c);
  auto f = [&](double s) { return thetap_half(s); };
  for (int k = 0; k < kTableCells; ++k) table_[k + 1] = table_[k] + gauss5(f, s1_ + k * dt_, s1_ + (k + 1) * dt_);
}

double DShape::closure(double xi) {
  xi_ = xi;
  // K from theta(half) = pi
  const double A = sd_.A, c = sd_.c;
  double sing = A / c * std::pow(s1_, c) +
                gauss5_composite([&](double s) { return A * std::pow(s, c - 1.0) * window(s); }, s1_, s2_, 200);
  double mass = gauss5_composite([&](double s) { return base(s); }, s1_, half_, 400);
  if (!(mass > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  K_ = (kPi - sing) / mass;
  if (!(K_ > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  build_table();

  // integral of cos theta over [0, half]; on [0, s1] substitute v = s^c
  const double q = 1.0 / c;
  double head = gauss5_composite(
      [&](double v) { return std::cos(A / c * v) * q * std::pow(v, q - 1.0); }, 0.0, std::pow(s1_, c), 64);
  double tail = 0.0;
  for (int k = 0; k < kTableCells; ++k)
    tail += gauss5([&](double s) { return std::cos(theta_half(s)); }, s1_ + k * dt_, s1_ + (k + 1) * dt_);
  return 2.0 * (head + tail) - (ell_ - kTwoPi);
}

double DShape::theta_half(double s) const {
  if (s <= s1_) return sd_.A / sd_.c * std::pow(s, sd_.c);
  auto k = static_cast<int>((s - s1_) / dt_);
  k = std::clamp(k, 0, kTableCells - 1);
  double t0 = s1_ + k * dt_;
  return table_[static_cast<std::size_t>(k)] + gauss5([&](double t) { return thetap_half(t); }, t0, s);
}

double DShape::theta(double s) const {
  if (s < 0.0 || s > ell_) throw ValidationError("arc parameter out of range");
  return s <= half_ ? theta_half(s) : kTwoPi - theta_half(ell_ - s);
}

double DShape::thetap(double s) const {
  if (s <= 0.0 || s >= ell_) throw ValidationError("theta' is singular at the arc ends");
  return thetap_half(std::min(s, ell_ - s));
}

double DShape::R(double s) const {
  if (s < 0.0 || s > ell_) return 0.0;
  const double t = std::min(s, ell_ - s);
  const double a = sd_.a, A = sd_.A, c = sd_.c;
  const double w = window(t);
  double series = a * t + a * A * A / (2.0 * c * (2.0 * c + 1.0)) * std::pow(t, 2.0 * c + 1.0) -
                  sd_.lambda * a / 6.0 * t * t * t;
  return w * series + (1.0 - w) * r_plateau_;
}

std::vector<double> DShape::start_chord(double s) const {
  if (!(s >= 0.0 && s <= s1_)) throw ValidationError("chord only available inside the series window");
  const double A = sd_.A, c = sd_.c, q = 1.0 / c, top = std::pow(s, c);
  auto weight = [&](double v) { return q * std::pow(v, q - 1.0); };
  double x = gauss5_composite([&](double v) { return std::cos(A / c * v) * weight(v); }, 0.0, top, 64);
  double y = gauss5_composite([&](double v) { return std::sin(A / c * v) * weight(v); }, 0.0, top, 64);
  return {x, y};
}

std::vector<double> DShape::end_chord(double s) const {
  auto v = start_chord(s);
  return {v[0], -v[1]};
}

double DShape::r_mass() const {
  return 2.0 * gauss5_composite([&](double s) { return R(s) * R(s); }, 0.0, half_, 2000);
}

NamedCurve DShape::discretize(std::size_t n) const {
  if (n < kMinSamples) throw ValidationError("too few samples");
  const double h = kTwoPi / static_cast<double>(n);
  std::vector<double> theta(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = (static_cast<double>(i) + 0.5) * h;
    if (u < ell_) {
      theta[i] = this->theta(u);
      phi[i] = R(u);
    } else {
      theta[i] = kTwoPi;
      phi[i] = 0.0;
    }
  }
  auto proj = project_to_closure(theta);
  return {DiscreteCurve::planar(std::move(proj.theta), kTwoPi), phi};
}

DShapeConfig build_dshape(const SingularData& singular, double ell, std::size_t n) {
  SingularData sd = make_singular_data(singular.a, singular.A, singular.c, singular.lambda);
  DShape shape(sd, ell);
  NamedCurve curve = shape.discretize(n);
  return {std::move(shape), std::move(curve), n};
}

// Surgery ------------------------------------------------------------------

SurgeryResult spline_surgery(const DShapeConfig& config, double sigma) {
  const DShape& d = config.shape;
  if (!(sigma > 0.0) || sigma > d.s1()) {
    std::ostringstream msg;
    msg << "sigma must lie in (0, " << d.s1() << "]";
    throw ValidationError(msg.str());
  }
  if (d.theta(sigma) >= 0.5) {
    std::ostringstream msg;
    msg << "sigma outside the asymptotic range: theta(sigma) = " << d.theta(sigma) << " >= 0.5";
    throw ValidationError(msg.str());
  }
  const double ell = d.ell();
  const double r0 = d.R(sigma);

  // sigma' from R(ell - sigma') = R(sigma)
  double lo = 0.0, hi = d.s1();
  if (d.R(ell - hi) < r0) throw NumericalError("no matching point for R at the far end");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (d.R(ell - mid) < r0) lo = mid;
    else hi = mid;
  }
  const double sigma_p = 0.5 * (lo + hi);

  // Local frames: e1 along the tangent leaving the singular point into the
  // arc (forward at s = 0, backward at s = ell), e2 = e1 rotated by +90 deg.
  auto frame_spline = [](const std::vector<double>& chord, double e1_angle, double end_angle) {
    double c = std::cos(e1_angle), s = std::sin(e1_angle);
    double x0 = chord[0] * c + chord[1] * s;
    double y0 = -chord[0] * s + chord[1] * c;
    return spline_coefficients(x0, y0, std::tan(end_angle - e1_angle));
  };
  const double th0 = d.theta(0.0), thl = d.theta(ell);
  SplineCoeffs sp1 = frame_spline(d.start_chord(sigma), th0, d.theta(sigma));
  auto ec = d.end_chord(sigma_p);
  SplineCoeffs sp2 = frame_spline({-ec[0], -ec[1]}, thl + kPi, d.theta(ell - sigma_p) + kPi);
  SplineArc arc1(sp1), arc2(sp2);

  const double l1 = arc1.length(), l2 = arc2.length();
  const double mid_len = ell - sigma - sigma_p;
  const double new_len = l1 + mid_len + l2 + d.segment_length();

  const std::size_t n = config.n;
  const double h = new_len / static_cast<double>(n);
  std::vector<double> theta(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = (static_cast<double>(i) + 0.5) * h;
    if (u < l1) {
      theta[i] = th0 + std::atan(sp1.dy(arc1.x_at(u)));
      phi[i] = r0;
    } else if (u < l1 + mid_len) {
      double s = sigma + (u - l1);
      theta[i] = d.theta(s);
      phi[i] = d.R(s);
    } else if (u < l1 + mid_len + l2) {
      double v = l1 + mid_len + l2 - u;   // distance back from x(ell)
      theta[i] = thl + std::atan(sp2.dy(arc2.x_at(v)));
      phi[i] = r0;
    } else {
      theta[i] = thl;
      phi[i] = r0;
    }
  }
  auto proj = project_to_closure(theta);
  DiscreteCurve curve = DiscreteCurve::planar(std::move(proj.theta), new_len);

  SurgeryResult out{curve.with_length(kTwoPi), phi, {}};
  SurgeryReport& r = out.report;
  r.sigma = sigma;
  r.sigma_prime = sigma_p;
  r.rq_before = rayleigh_quotient_curve(config.curve.curve, *config.curve.phi);
  r.length_factor = std::pow(new_len / kTwoPi, 2);
  r.rq_after = rayleigh_quotient_curve(curve, phi) * r.length_factor;
  r.new_length = new_len;
  r.length_defect = std::abs(l1 - sigma);
  r.bending = r0 * r0 * spline_bending(sp1);
  r.curvature_bound = spline_curvature_bound(sp1, sp1.x0);
  r.r0 = r0;
  r.predicted_slope = 2.0 * d.singular().a * d.singular().a / d.r_mass();
  return out;
}

SlopeFit fit_decrease_slope(const std::vector<SurgeryReport>& reports) {
  if (reports.size() < 3) throw ValidationError("slope fit needs at least 3 reports");
  std::vector<double> xs;
  for (const auto& r : reports) {
    if (std::find(xs.begin(), xs.end(), r.sigma) != xs.end())
      throw ValidationError("slope fit needs distinct sigma values");
    xs.push_back(r.sigma);
  }
  const double n = static_cast<double>(reports.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : reports) {
    sx += r.sigma;
    sy += r.rq_after;
    sxx += r.sigma * r.sigma;
    sxy += r.sigma * r.rq_after;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  SlopeFit fit;
  fit.intercept = (sy - slope * sx) / n;
  fit.slope_b = -slope;
  const double mean = sy / n;
  double ss_tot = 0, ss_res = 0;
  for (const auto& r : reports) {
    double pred = fit.intercept + slope * r.sigma;
    ss_res += std::pow(r.rq_after - pred, 2);
    ss_tot += std::pow(r.rq_after - mean, 2);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.predicted = reports.front().predicted_slope;
  fit.ratio = fit.predicted > 0.0 ? fit.slope_b / fit.predicted : 0.0;
  return fit;
}

double fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("power-law fit needs matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("power-law fit needs positive data");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ovalab
