#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ovalab {

inline constexpr double kRadiusFloor = 1e-10;
/// Above this s the singular expansions are flagged as unreliable. The
/// threshold is a working guess, not a derived bound.
inline constexpr double kSeriesValidity = 0.5;

struct PolarState {
  double R = 0.0;
  double Rp = 0.0;
  double theta = 0.0;
  double thetap = 0.0;
};

/// Cartesian phase point y = (psi, psi') in R^{2n}.
using CartesianState = std::vector<double>;

/// (psi', -lambda psi + (mu.psi) psi / |psi|^3 - mu / |psi|)
CartesianState el_rhs_cartesian(std::span<const double> y, double lambda, std::span<const double> mu);

/// (R', R(theta'^2 - lambda), theta', (mu sin theta - 2 R R' theta') / R^2),
/// with mu >= 0 along the first axis.
PolarState el_rhs_polar(const PolarState& s, double lambda, double mu);

/// 1/2 |psi'|^2 + lambda/2 |psi|^2 + (mu.psi)/|psi|
double energy(std::span<const double> y, double lambda, std::span<const double> mu);
/// 1/2 (R'^2 + R^2 theta'^2 + lambda R^2) + mu cos theta
double energy(const PolarState& s, double lambda, double mu);

CartesianState polar_to_cartesian(const PolarState& s);
PolarState cartesian_to_polar(std::span<const double> y);

struct IntegrateOptions {
  double tol = 1e-10;                 // rtol; atol = tol / 10
  std::vector<double> samples;        // increasing parameter values for dense output
  std::size_t max_steps = 2'000'000;
  double max_step = 0.0;              // 0: unlimited
};

struct Trajectory {
  std::vector<double> s;
  std::vector<std::vector<double>> y;  // state at each sample
  double energy0 = 0.0;
  double max_drift = 0.0;              // max |E - E(start)| over accepted steps
  bool floor_hit = false;
  double stop = 0.0;                   // parameter where integration ended
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;
using Scalar = std::function<double(std::span<const double>)>;

/// Dormand-Prince 5(4) with PI step control and the standard 4th order
/// dense output. Stops early (floor_hit) when `radius` drops below
/// kRadiusFloor; throws NumericalError on step-size underflow.
Trajectory integrate(const Rhs& f, std::vector<double> y0, double s0, double s1,
                     const IntegrateOptions& opts, const Scalar& radius = {},
                     const Scalar& energy_fn = {});

Trajectory integrate_cartesian(const CartesianState& y0, double lambda, std::span<const double> mu,
                               double span, const IntegrateOptions& opts);
Trajectory integrate_polar(const PolarState& y0, double s0, double s1, double lambda, double mu,
                           const IntegrateOptions& opts);

struct SingularData {
  double a = 1.0;
  double A = 0.5;
  double c = 0.5;
  double lambda = 1.0;
  double mu = 0.75;
};

/// c = -1/2 + sqrt(1/4 + mu/a^2)
double indicial_exponent(double mu, double a);

/// Fills mu = a^2 c (c + 1) and validates the data.
SingularData make_singular_data(double a, double A, double c, double lambda);

struct SeriesState {
  PolarState state;
  double Rpp = 0.0;
  bool beyond_validity = false;   // s > kSeriesValidity
};

/// Truncated expansions at a singular end with theta(0) = 0:
///   theta  = (A/c) s^c
///   theta' = A s^{c-1}
///   R   = a s + a A^2 / (2c(2c+1)) s^{2c+1} - (lambda a / 6) s^3
///   R'  = a + a A^2 / (2c) s^{2c} - (lambda a / 2) s^2
///   R'' = a A^2 s^{2c-1} - lambda a s
SeriesState singular_series(const SingularData& d, double s);

struct ShootResult {
  Trajectory trajectory;          // polar states (R, R', theta, theta')
  double target_energy = 0.0;     // a^2/2 + mu
  double max_energy_error = 0.0;  // max |E - target| over accepted steps
};

ShootResult shoot_from_singularity(const SingularData& d, double eps, double span, double tol,
                                   std::vector<double> samples = {});

/// Integrated minus series state at 2 eps, starting from the series at eps.
PolarState seed_discrepancy(const SingularData& d, double eps, double tol);

/// Largest distance of psi(s), psi'(s) from span(basis) over the samples of
/// a Cartesian trajectory. Basis vectors are orthonormalized first.
double subspace_defect(const Trajectory& traj, const std::vector<std::vector<double>>& basis);

}  // namespace ovalab
