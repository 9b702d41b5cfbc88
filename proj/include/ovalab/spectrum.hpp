#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ovalab/geometry.hpp"
#include "ovalab/tridiagonal.hpp"

namespace ovalab {

inline constexpr double kEigenTolerance = 1e-12;
inline constexpr int kEigenMaxIterations = 500;
/// Eigenvalue quoted in the literature as a candidate infimum; only reported.
inline constexpr double kLambdaStar = 0.6085;

enum class Boundary { periodic, dirichlet };

struct EigenResult {
  double lambda = 0.0;
  std::vector<double> phi;     // positive, h * sum phi^2 = 1
  double residual = 0.0;       // discrete L2 norm of (H - lambda) phi
  std::size_t n = 0;
  double length = 0.0;
  bool converged = false;
  int iterations = 0;
  std::size_t capped = 0;      // curvature samples clipped at kappa_max
};

struct ComponentQuotient {
  IndexRange interval;
  double rq = 0.0;
};

struct StudyRow {
  std::size_t n = 0;
  double lambda = 0.0;
  double residual = 0.0;
  double observed_order = 0.0;  // NaN until three grids are available
};

struct ConvergenceStudy {
  std::vector<StudyRow> rows;
  double extrapolated = 0.0;    // Richardson estimate from the last two grids
};

/// Smallest eigenpair of a symmetric tridiagonal (optionally cyclic)
/// matrix with nonpositive off-diagonal entries. Shifted inverse power
/// iteration from a positive start with fixed shift `shift0`, then Rayleigh
/// quotient iteration. `h` is the quadrature weight for normalization.
EigenResult smallest_eigenpair(const SymTridiagonal& h_matrix, double shift0, double h);

/// -d^2/ds^2 + kappa^2 with pointwise potential. Periodic: N samples,
/// h = L/N. Dirichlet: N interior nodes of [0, L], h = L/(N + 1).
/// |kappa| is clipped at 2 pi / h (N at L = 2 pi); the count is reported.
EigenResult principal_eigen(std::span<const double> kappa, double length,
                            Boundary bc = Boundary::periodic);

/// Principal eigenpair of the curve functional in edge form: the cyclic
/// matrix with diagonal 2/h^2 and off-diagonal -max(t_i . t_{i+1}, 0)/h^2.
/// For smooth curves the weight equals -(1 - h^2 kappa^2 / 2)/h^2 at each
/// junction, so this is -d^2/ds^2 + kappa^2 to second order.
EigenResult curve_eigen(const DiscreteCurve& curve);

/// sum |psi_{i+1} - psi_i|^2 / h  /  h sum |psi_i|^2
double rayleigh_quotient_harmonic(const HarmonicField& field);

/// I[x, phi] / ||phi||^2 with the edge-form quadrature
/// sum [(phi_{i+1} - phi_i)^2 / h^2 + w_i phi_i phi_{i+1}] h, w_i = |t_{i+1} - t_i|^2 / h^2.
double rayleigh_quotient_curve(const DiscreteCurve& curve, std::span<const double> phi);

std::vector<ComponentQuotient> component_rayleigh_quotients(
    const HarmonicField& field, double rel_threshold = kDefaultZeroThreshold);

/// Runs `solve` on each grid size in increasing order. Observed order uses
/// three consecutive grids: p = log(|l1 - l0| / |l2 - l1|) / log(N2 / N1).
ConvergenceStudy convergence_study(const std::function<EigenResult(std::size_t)>& solve,
                                   const std::vector<std::size_t>& grids);

}  // namespace ovalab
