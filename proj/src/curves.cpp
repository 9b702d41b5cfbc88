#include <algorithm>
#include <array>
#include <cstddef>
#include <cmath>
#include <sstream>

#include "ovalab/common.hpp"
#include "ovalab/geometry.hpp"
#include "ovalab/quadrature.hpp"

namespace ovalab {

namespace {

double ellipse_vx(double t, const CurveParams& p) { return -p.a * std::sin(t); }
double ellipse_vy(double t, const CurveParams& p) { return p.b * std::cos(t); }

// r(t) = 1 + amplitude cos 2t in polar form
double peanut_vx(double t, const CurveParams& p) {
  double r = 1.0 + p.amplitude * std::cos(2.0 * t);
  double dr = -2.0 * p.amplitude * std::sin(2.0 * t);
  return dr * std::cos(t) - r * std::sin(t);
}
double peanut_vy(double t, const CurveParams& p) {
  double r = 1.0 + p.amplitude * std::cos(2.0 * t);
  double dr = -2.0 * p.amplitude * std::sin(2.0 * t);
  return dr * std::sin(t) + r * std::cos(t);
}

std::vector<double> grid(std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
  return s;
}

// Circular arc of n_arc equal edges followed by a straight chord of n - n_arc
// edges. The arc's turning angle is chosen so the polygon closes exactly:
// |sum_j exp(i delta (j + 1/2))| = sin(n_arc delta / 2) / sin(delta / 2) = n - n_arc.
std::vector<double> dshape_angles(double ell, std::size_t n) {
  const double h = kTwoPi / static_cast<double>(n);
  if (!(ell > kPi && ell < kTwoPi)) throw ValidationError("dshape arc length must lie in (pi, 2 pi)");
  const auto n_arc = static_cast<std::size_t>(std::lround(ell / h));
  const std::size_t n_seg = n - n_arc;
  if (n_seg < 1 || n_seg >= n_arc) throw ValidationError("dshape arc length too close to pi or 2 pi for this grid");
  const double na = static_cast<double>(n_arc);
  auto chord = [&](double delta) { return std::sin(0.5 * na * delta) / std::sin(0.5 * delta); };
  double lo = 1e-14, hi = kTwoPi / na;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (chord(mid) > static_cast<double>(n_seg)) lo = mid;
    else hi = mid;
  }
  const double delta = 0.5 * (lo + hi);
  const double alpha = na * delta;
  std::vector<double> theta(n);
  for (std::size_t j = 0; j < n_arc; ++j) theta[j] = delta * (static_cast<double>(j) + 0.5);
  for (std::size_t j = n_arc; j < n; ++j) theta[j] = 0.5 * alpha + kPi;
  return theta;
}

}  // namespace

DiscreteCurve resample_parametric(double (*vx)(double, const CurveParams&),
                                  double (*vy)(double, const CurveParams&),
                                  const CurveParams& params, std::size_t n) {
  if (n < kMinSamples) throw ValidationError("too few samples");
  auto speed = [&](double t) { return std::hypot(vx(t, params), vy(t, params)); };
  auto integrate = [&](double a, double b) { return gauss5(speed, a, b); };
  // cumulative arclength table on a fine parameter grid
  const std::size_t cells = std::max<std::size_t>(16 * n, 4096);
  const double dt = kTwoPi / static_cast<double>(cells);
  std::vector<double> cum(cells + 1, 0.0);
  for (std::size_t k = 0; k < cells; ++k) cum[k + 1] = cum[k] + integrate(dt * k, dt * (k + 1));
  const double perimeter = cum.back();

  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    double target = perimeter * static_cast<double>(i) / static_cast<double>(n);
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - cum.begin()) - 1));
    k = std::min(k, cells - 1);
    double t0 = dt * static_cast<double>(k);
    double t = t0 + dt * (target - cum[k]) / (cum[k + 1] - cum[k]);
    for (int newton = 0; newton < 30; ++newton) {
      double g = cum[k] + integrate(t0, t) - target;
      double step = g / speed(t);
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    raw[i] = std::atan2(vy(t, params), vx(t, params));
  }
  std::vector<double> theta(n);
  theta[0] = raw[0];
  for (std::size_t i = 1; i < n; ++i) theta[i] = theta[i - 1] + std::remainder(raw[i] - theta[i - 1], kTwoPi);
  // point samples of a smooth closed curve close to spectral accuracy; the
  // projection removes the remaining round-off
  auto proj = project_to_closure(theta);
  return DiscreteCurve::planar(std::move(proj.theta), perimeter);
}

DiscreteCurve ellipse_curve(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("ellipse semi-axes must be positive");
  CurveParams p;
  p.a = a;
  p.b = b;
  return resample_parametric(ellipse_vx, ellipse_vy, p, n);
}

NamedCurve make_named_curve(std::string_view name, const CurveParams& params, std::size_t n) {
  if (n < kMinSamples) {
    std::ostringstream msg;
    msg << "too few samples: " << n;
    throw ValidationError(msg.str());
  }
  const auto s = grid(n);
  const double scale = 1.0 / std::sqrt(kTwoPi);

  if (name == "circle") {
    std::vector<double> phi(n, scale);
    return {DiscreteCurve::planar(s, kTwoPi), phi};
  }
  if (name == "digon") {
    if (n % 2 != 0) throw ValidationError("digon needs an even sample count");
    std::vector<double> theta(n, 0.0), phi(n);
    for (std::size_t i = n / 2; i < n; ++i) theta[i] = kPi;
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::abs(std::sin(s[i])) / std::sqrt(kPi);
    return {DiscreteCurve::planar(theta, kTwoPi), phi};
  }
  if (name == "ellipse") {
    return {ellipse_curve(params.a, params.b, n).with_length(kTwoPi), std::nullopt};
  }
  if (name == "peanut") {
    if (!(params.amplitude >= 0.0 && params.amplitude < 1.0))
      throw ValidationError("peanut amplitude must lie in [0, 1)");
    return {resample_parametric(peanut_vx, peanut_vy, params, n).with_length(kTwoPi), std::nullopt};
  }
  if (name == "dshape") {
    return {DiscreteCurve::planar(dshape_angles(params.ell, n), kTwoPi), std::nullopt};
  }
  if (name == "point_symmetric_random") {
    if (n % 2 != 0) throw ValidationError("point_symmetric_random needs an even sample count");
    SplitMix64 rng(params.seed);
    std::array<double, 3> ca{}, sa{};
    for (std::size_t j = 0; j < 3; ++j) {
      double k = 2.0 * static_cast<double>(j + 1);
      ca[j] = rng.uniform(-0.6, 0.6) / k;
      sa[j] = rng.uniform(-0.6, 0.6) / k;
    }
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n / 2; ++i) {
      double t = s[i];
      for (std::size_t j = 0; j < 3; ++j) {
        double k = 2.0 * static_cast<double>(j + 1);
        t += ca[j] * std::cos(k * s[i]) + sa[j] * std::sin(k * s[i]);
      }
      theta[i] = t;
      theta[i + n / 2] = t + kPi;
    }
    return {DiscreteCurve::planar(theta, kTwoPi), std::nullopt};
  }
  if (name == "random_closed") {
    SplitMix64 rng(params.seed);
    std::vector<double> theta(s);
    const double phase = rng.uniform(0.0, kTwoPi);
    for (int k = 1; k <= 6; ++k) {
      double amp = 1.2 / (k * k);
      double a = rng.uniform(-amp, amp), b = rng.uniform(-amp, amp);
      for (std::size_t i = 0; i < n; ++i) theta[i] += a * std::cos(k * s[i]) + b * std::sin(k * s[i]);
    }
    for (double& t : theta) t += phase;
    auto proj = project_to_closure(theta);
    return {DiscreteCurve::planar(std::move(proj.theta), kTwoPi), std::nullopt};
  }
  throw ValidationError("unknown curve name: " + std::string(name));
}

}  // namespace ovalab
