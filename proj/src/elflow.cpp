#include "ovalab/elflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ovalab/common.hpp"

namespace ovalab {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void polar_rhs_raw(std::span<const double> y, std::span<double> dy, double lambda, double mu) {
  const double R = y[0], Rp = y[1], th = y[2], thp = y[3];
  dy[0] = Rp;
  dy[1] = R * (thp * thp - lambda);
  dy[2] = thp;
  dy[3] = (mu * std::sin(th) - 2.0 * R * Rp * thp) / (R * R);
}

void cartesian_rhs_raw(std::span<const double> y, std::span<double> dy, double lambda,
                       std::span<const double> mu) {
  const std::size_t n = mu.size();
  double r2 = 0.0, mp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r2 += y[k] * y[k];
    mp += mu[k] * y[k];
  }
  const double r = std::sqrt(r2);
  for (std::size_t k = 0; k < n; ++k) {
    dy[k] = y[n + k];
    dy[n + k] = -lambda * y[k] + mp * y[k] / (r2 * r) - mu[k] / r;
  }
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output weights (Hairer & Wanner, contd5)
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

CartesianState el_rhs_cartesian(std::span<const double> y, double lambda, std::span<const double> mu) {
  const std::size_t n = mu.size();
  if (n < 2 || y.size() != 2 * n) throw ValidationError("state size must be twice the dimension of mu");
  if (norm2(y.subspan(0, n)) == 0.0) throw ValidationError("EL right-hand side undefined at psi = 0");
  CartesianState dy(2 * n);
  cartesian_rhs_raw(y, dy, lambda, mu);
  return dy;
}

PolarState el_rhs_polar(const PolarState& s, double lambda, double mu) {
  if (!(s.R > 0.0)) throw ValidationError("polar EL right-hand side needs R > 0");
  double y[4] = {s.R, s.Rp, s.theta, s.thetap}, dy[4];
  polar_rhs_raw(y, dy, lambda, mu);
  return {dy[0], dy[1], dy[2], dy[3]};
}

double energy(std::span<const double> y, double lambda, std::span<const double> mu) {
  const std::size_t n = mu.size();
  if (y.size() != 2 * n) throw ValidationError("state size must be twice the dimension of mu");
  double r2 = 0.0, v2 = 0.0, mp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    r2 += y[k] * y[k];
    v2 += y[n + k] * y[n + k];
    mp += mu[k] * y[k];
  }
  if (r2 == 0.0) throw ValidationError("energy undefined at psi = 0");
  return 0.5 * v2 + 0.5 * lambda * r2 + mp / std::sqrt(r2);
}

double energy(const PolarState& s, double lambda, double mu) {
  if (!(s.R > 0.0)) throw ValidationError("energy needs R > 0");
  return 0.5 * (s.Rp * s.Rp + s.R * s.R * s.thetap * s.thetap + lambda * s.R * s.R) + mu * std::cos(s.theta);
}

CartesianState polar_to_cartesian(const PolarState& s) {
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  return {s.R * c, s.R * sn, s.Rp * c - s.R * s.thetap * sn, s.Rp * sn + s.R * s.thetap * c};
}

PolarState cartesian_to_polar(std::span<const double> y) {
  if (y.size() != 4) throw ValidationError("polar form needs a planar state");
  const double r = std::hypot(y[0], y[1]);
  if (r == 0.0) throw ValidationError("polar form undefined at psi = 0");
  PolarState p;
  p.R = r;
  p.theta = std::atan2(y[1], y[0]);
  p.Rp = (y[0] * y[2] + y[1] * y[3]) / r;
  p.thetap = (y[0] * y[3] - y[1] * y[2]) / (r * r);
  return p;
}

Trajectory integrate(const Rhs& f, std::vector<double> y, double s0, double s1,
                     const IntegrateOptions& opts, const Scalar& radius, const Scalar& energy_fn) {
  if (!(s1 > s0)) throw ValidationError("integration span must be positive");
  if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be positive");
  for (std::size_t i = 0; i < opts.samples.size(); ++i) {
    double t = opts.samples[i];
    if (t < s0 - 1e-14 || t > s1 + 1e-14 || (i > 0 && t < opts.samples[i - 1]))
      throw ValidationError("sample points must be increasing and inside the span");
  }
  const std::size_t n = y.size();
  const double rtol = opts.tol, atol = opts.tol / 10.0;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n);

  Trajectory tr;
  tr.energy0 = energy_fn ? energy_fn(y) : 0.0;
  std::size_t next = 0;
  auto record = [&](double t, const std::vector<double>& v) {
    tr.s.push_back(t);
    tr.y.push_back(v);
  };
  while (next < opts.samples.size() && opts.samples[next] <= s0) record(opts.samples[next++], y);

  double s = s0;
  f(s, y, k1);
  double h;
  {
    double dn = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sc = atol + rtol * std::abs(y[i]);
      dn += std::pow(y[i] / sc, 2);
      fn += std::pow(k1[i] / sc, 2);
    }
    dn = std::sqrt(dn / n);
    fn = std::sqrt(fn / n);
    h = (dn < 1e-5 || fn < 1e-5) ? 1e-6 : 0.01 * dn / fn;
    h = std::min(h, s1 - s0);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  double facold = 1e-4;
  bool last_rejected = false;

  while (s < s1) {
    if (tr.steps + tr.rejected >= opts.max_steps) {
      std::ostringstream msg;
      msg << "integrator exceeded " << opts.max_steps << " steps at s = " << s;
      throw NumericalError(msg.str());
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    bool final_step = false;
    if (s + h >= s1) {
      h = s1 - s;
      final_step = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(s))) {
      std::ostringstream msg;
      msg << "step size underflow at s = " << s;
      throw NumericalError(msg.str());
    }
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(s + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(s + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(s + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(s + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(s + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(s + h, ynew, k7);

    double en = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      en = std::max(en, std::abs(e / sc));
      finite = finite && std::isfinite(ynew[i]);
    }
    en = finite ? en : 1e10;

    if (en <= 1.0) {
      if (radius && radius(ynew) < kRadiusFloor) {
        tr.floor_hit = true;
        break;
      }
      // dense output for samples in (s, s + h]
      if (next < opts.samples.size() && opts.samples[next] <= s + h) {
        std::vector<double> r2(n), r3(n), r4(n), r5(n), v(n);
        for (std::size_t i = 0; i < n; ++i) {
          double dy = ynew[i] - y[i];
          double bspl = h * k1[i] - dy;
          r2[i] = dy;
          r3[i] = bspl;
          r4[i] = dy - h * k7[i] - bspl;
          r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        while (next < opts.samples.size() && opts.samples[next] <= s + h) {
          double t = opts.samples[next];
          double th = (t - s) / h, th1 = 1.0 - th;
          for (std::size_t i = 0; i < n; ++i)
            v[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
          record(t, v);
          ++next;
        }
      }
      if (energy_fn) tr.max_drift = std::max(tr.max_drift, std::abs(energy_fn(ynew) - tr.energy0));
      s = final_step ? s1 : s + h;
      y.swap(ynew);
      k1.swap(k7);
      ++tr.steps;
      // PI controller (beta = 0.04)
      double fac11 = std::pow(std::max(en, 1e-16), 0.17);
      double fac = fac11 / std::pow(facold, 0.04);
      fac = std::clamp(fac / 0.9, 0.2, 10.0);
      double hnew = h / fac;
      if (last_rejected) hnew = std::min(hnew, h);
      facold = std::max(en, 1e-4);
      h = hnew;
      last_rejected = false;
    } else {
      double fac11 = std::pow(en, 0.17);
      h /= std::min(10.0, fac11 / 0.9);
      ++tr.rejected;
      last_rejected = true;
    }
  }
  tr.stop = s;
  return tr;
}

Trajectory integrate_cartesian(const CartesianState& y0, double lambda, std::span<const double> mu,
                               double span, const IntegrateOptions& opts) {
  const std::size_t n = mu.size();
  if (n < 2 || y0.size() != 2 * n) throw ValidationError("state size must be twice the dimension of mu");
  std::vector<double> m(mu.begin(), mu.end());
  Rhs f = [m, lambda](double, std::span<const double> y, std::span<double> dy) {
    cartesian_rhs_raw(y, dy, lambda, m);
  };
  Scalar rad = [n](std::span<const double> y) { return norm2(y.subspan(0, n)); };
  Scalar en = [m, lambda](std::span<const double> y) { return energy(y, lambda, m); };
  if (rad(y0) < kRadiusFloor) throw ValidationError("initial psi is below the floor");
  return integrate(f, y0, 0.0, span, opts, rad, en);
}

Trajectory integrate_polar(const PolarState& y0, double s0, double s1, double lambda, double mu,
                           const IntegrateOptions& opts) {
  if (!(y0.R > kRadiusFloor)) throw ValidationError("initial R is below the floor");
  Rhs f = [lambda, mu](double, std::span<const double> y, std::span<double> dy) {
    polar_rhs_raw(y, dy, lambda, mu);
  };
  Scalar rad = [](std::span<const double> y) { return y[0]; };
  Scalar en = [lambda, mu](std::span<const double> y) {
    return 0.5 * (y[1] * y[1] + y[0] * y[0] * y[3] * y[3] + lambda * y[0] * y[0]) + mu * std::cos(y[2]);
  };
  return integrate(f, {y0.R, y0.Rp, y0.theta, y0.thetap}, s0, s1, opts, rad, en);
}

double indicial_exponent(double mu, double a) {
  if (!(a > 0.0) || !(mu > 0.0)) throw ValidationError("indicial exponent needs a > 0 and mu > 0");
  return -0.5 + std::sqrt(0.25 + mu / (a * a));
}

SingularData make_singular_data(double a, double A, double c, double lambda) {
  if (!(a > 0.0)) throw ValidationError("a must be positive");
  if (!(A >= 0.0)) throw ValidationError("A must be nonnegative");
  if (!(c > 0.0)) throw ValidationError("c must be positive (mu < 0 is excluded)");
  if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
  return {a, A, c, lambda, a * a * c * (c + 1.0)};
}

SeriesState singular_series(const SingularData& d, double s) {
  if (!(s > 0.0)) throw ValidationError("series evaluation needs s > 0");
  if (!(d.a > 0.0 && d.c > 0.0 && d.A >= 0.0)) throw ValidationError("invalid singular data");
  const double a = d.a, A = d.A, c = d.c, lam = d.lambda;
  const double sc = std::pow(s, c), s2c = sc * sc;
  SeriesState out;
  out.state.theta = (A / c) * sc;
  out.state.thetap = A * sc / s;
  out.state.R = a * s + a * A * A / (2.0 * c * (2.0 * c + 1.0)) * s2c * s - lam * a / 6.0 * s * s * s;
  out.state.Rp = a + a * A * A / (2.0 * c) * s2c - lam * a / 2.0 * s * s;
  out.Rpp = a * A * A * s2c / s - lam * a * s;
  out.beyond_validity = s > kSeriesValidity;
  return out;
}

ShootResult shoot_from_singularity(const SingularData& d, double eps, double span, double tol,
                                   std::vector<double> samples) {
  if (!(eps >= 1e-6 && eps <= 0.1)) throw ValidationError("shooting offset eps must lie in [1e-6, 0.1]");
  if (!(span > eps)) throw ValidationError("span must exceed eps");
  IntegrateOptions opts;
  opts.tol = tol;
  opts.samples = std::move(samples);
  ShootResult r;
  SeriesState seed = singular_series(d, eps);
  r.trajectory = integrate_polar(seed.state, eps, span, d.lambda, d.mu, opts);
  r.target_energy = 0.5 * d.a * d.a + d.mu;
  r.max_energy_error = std::abs(r.trajectory.energy0 - r.target_energy) + r.trajectory.max_drift;
  return r;
}

PolarState seed_discrepancy(const SingularData& d, double eps, double tol) {
  IntegrateOptions opts;
  opts.tol = tol;
  opts.samples = {2.0 * eps};
  Trajectory t = integrate_polar(singular_series(d, eps).state, eps, 2.0 * eps, d.lambda, d.mu, opts);
  if (t.y.empty()) throw NumericalError("seed integration stopped before 2 eps");
  PolarState ref = singular_series(d, 2.0 * eps).state;
  const auto& y = t.y.back();
  return {y[0] - ref.R, y[1] - ref.Rp, y[2] - ref.theta, y[3] - ref.thetap};
}

double subspace_defect(const Trajectory& traj, const std::vector<std::vector<double>>& basis) {
  if (traj.y.empty()) return 0.0;
  const std::size_t n = traj.y.front().size() / 2;
  std::vector<std::vector<double>> q;
  for (const auto& b : basis) {
    if (b.size() != n) throw ValidationError("basis vector dimension mismatch");
    std::vector<double> v = b;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) {
        double p = 0.0;
        for (std::size_t k = 0; k < n; ++k) p += v[k] * e[k];
        for (std::size_t k = 0; k < n; ++k) v[k] -= p * e[k];
      }
    double nv = norm2(v);
    if (nv > 1e-12 * std::max(1.0, norm2(b))) {
      for (double& x : v) x /= nv;
      q.push_back(std::move(v));
    }
  }
  double worst = 0.0;
  for (const auto& y : traj.y) {
    for (std::size_t part = 0; part < 2; ++part) {
      std::vector<double> v(y.begin() + static_cast<std::ptrdiff_t>(part * n),
                            y.begin() + static_cast<std::ptrdiff_t>((part + 1) * n));
      for (const auto& e : q) {
        double p = 0.0;
        for (std::size_t k = 0; k < n; ++k) p += v[k] * e[k];
        for (std::size_t k = 0; k < n; ++k) v[k] -= p * e[k];
      }
      worst = std::max(worst, norm2(v));
    }
  }
  return worst;
}

}  // namespace ovalab
