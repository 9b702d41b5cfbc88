#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ovalab/geometry.hpp"

namespace ovalab {

inline constexpr double kPsiFloor = 1e-8;      // relative to max |psi|
inline constexpr double kProjectionTol = 1e-12;

struct Multipliers {
  double lambda = 0.0;
  std::vector<double> mu;
  double el_residual = 0.0;       // discrete L2 norm of the EL residual
  std::vector<double> residual;   // D^2 psi + lambda psi + P mu / |psi|, sample-major
};

struct DescentState {
  std::size_t iter = 0;
  double rq = 0.0;
  double lambda_est = 0.0;
  std::vector<double> mu_est;
  double loop_residual = 0.0;     // |h sum psi / |psi||
  double el_residual = 0.0;
  double step = 0.0;
};

struct DescentOptions {
  std::size_t max_iter = 2000;
  double tol = 1e-6;
  double step0 = 0.1;
  bool precondition = true;       // Sobolev (1 - D^2) preconditioner
};

enum class DescentVerdict { converged, max_iter, zero_set_approach, stagnation };

std::string to_string(DescentVerdict v);

struct DescentResult {
  HarmonicField field;
  std::vector<DescentState> trace;
  DescentVerdict verdict = DescentVerdict::max_iter;
};

/// Least-squares (lambda, mu) for D^2 psi + lambda psi + P_i mu / |psi_i| = 0,
/// P_i the projector orthogonal to psi_i.
Multipliers multipliers_and_residual(const HarmonicField& field);

/// L2 gradient of I restricted by the given multipliers:
/// -2 (D^2 psi + lambda psi + P mu / |psi|).
std::vector<double> gradient(const HarmonicField& field, double lambda, const std::vector<double>& mu);

/// Same with least-squares multipliers; this is the projected gradient of I
/// on the constraint manifold. Requires h sum |psi|^2 = 1.
std::vector<double> gradient(const HarmonicField& field);

/// L2 gradient of the Rayleigh quotient, (-2 D^2 psi - 2 RQ psi) / ||psi||^2.
std::vector<double> rq_gradient(const HarmonicField& field);

/// Unit L2 norm and h sum psi / |psi| = 0 via Newton on corrections
/// P_i c / |psi_i|.
HarmonicField project_constraints(const HarmonicField& field);

double loop_residual(const HarmonicField& field);

DescentResult minimize(const HarmonicField& init, const DescentOptions& opts = {});

}  // namespace ovalab
