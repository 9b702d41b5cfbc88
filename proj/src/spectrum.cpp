#include "ovalab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ovalab/common.hpp"

namespace ovalab {

namespace {

double weighted_norm(std::span<const double> v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * h);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// normalize to h * sum v^2 = 1 with positive sum
void normalize_positive(std::vector<double>& v, double h) {
  double nrm = weighted_norm(v, h);
  double sum = 0.0;
  for (double x : v) sum += x;
  double scale = (sum < 0.0 ? -1.0 : 1.0) / nrm;
  for (double& x : v) x *= scale;
}

double rayleigh(const SymTridiagonal& a, std::span<const double> v) {
  auto av = multiply(a, v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += v[i] * av[i];
    den += v[i] * v[i];
  }
  return num / den;
}

double increment(std::span<const double> a, std::span<const double> b, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * h);
}

}  // namespace

EigenResult smallest_eigenpair(const SymTridiagonal& a, double shift0, double h) {
  const std::size_t n = a.size();
  EigenResult out;
  out.n = n;
  std::vector<double> phi(n, 1.0);
  normalize_positive(phi, h);

  // Round-off floor of the residual: eps times the infinity norm of the matrix.
  double norm_a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(a.diag[i]);
    if (i < a.off.size()) row += std::abs(a.off[i]);
    if (i > 0) row += std::abs(a.off[i - 1]);
    else if (a.periodic && !a.off.empty()) row += std::abs(a.off.back());
    norm_a = std::max(norm_a, row);
  }
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * norm_a;

  auto residual_of = [&](const std::vector<double>& v, double lam) {
    auto av = multiply(a, v);
    for (std::size_t i = 0; i < n; ++i) av[i] -= lam * v[i];
    return weighted_norm(av, h);
  };

  int it = 0;
  // Phase 1: fixed shift below the spectrum keeps the inverse positive.
  for (; it < kEigenMaxIterations; ++it) {
    auto y = solve_shifted(a, shift0, phi);
    if (!all_finite(y)) throw NumericalError("inverse iteration produced non-finite values");
    normalize_positive(y, h);
    double inc = increment(y, phi, h);
    phi = std::move(y);
    if (inc < 1e-6) break;
  }

  // Phase 2: Rayleigh quotient iteration.
  double lambda = rayleigh(a, phi);
  for (; it < kEigenMaxIterations; ++it) {
    auto y = solve_shifted(a, lambda, phi);
    if (!all_finite(y)) {
      // shift hit the eigenvalue exactly; phi is already an eigenvector
      out.converged = true;
      break;
    }
    normalize_positive(y, h);
    double inc = increment(y, phi, h);
    phi = std::move(y);
    lambda = rayleigh(a, phi);
    if (inc < kEigenTolerance || residual_of(phi, lambda) <= floor) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.lambda = lambda;
  out.residual = residual_of(phi, lambda);
  if (std::any_of(phi.begin(), phi.end(), [](double x) { return !(x > 0.0); })) out.converged = false;
  out.phi = std::move(phi);
  return out;
}

EigenResult principal_eigen(std::span<const double> kappa, double length, Boundary bc) {
  const std::size_t n = kappa.size();
  if (n < kMinSamples) throw ValidationError("too few samples for the eigensolver");
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("length must be positive");
  for (double k : kappa)
    if (!std::isfinite(k)) throw ValidationError("non-finite curvature sample");

  const double h = bc == Boundary::periodic ? length / static_cast<double>(n)
                                            : length / static_cast<double>(n + 1);
  const double kmax = kTwoPi / h;
  SymTridiagonal a;
  a.periodic = bc == Boundary::periodic;
  a.diag.resize(n);
  std::size_t capped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double k = std::abs(kappa[i]);
    if (k > kmax) {
      k = kmax;
      ++capped;
    }
    a.diag[i] = 2.0 / (h * h) + k * k;
  }
  a.off.assign(a.periodic ? n : n - 1, -1.0 / (h * h));
  const double shift0 = -std::pow(kTwoPi / length, 2);
  EigenResult r = smallest_eigenpair(a, shift0, h);
  r.length = length;
  r.capped = capped;
  return r;
}

EigenResult curve_eigen(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const auto d = static_cast<std::size_t>(curve.dim());
  const double h = curve.spacing();
  // Solved in grid units (the matrix times h^2) and scaled back, so the
  // iteration does not see the length at all: lambda(t x) t^2 = lambda(x)
  // up to the rounding of h^2.
  SymTridiagonal a;
  a.periodic = true;
  a.diag.assign(n, 2.0);
  a.off.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto t0 = curve.tangent(i);
    auto t1 = curve.tangent((i + 1) % n);
    double c = 0.0;
    for (std::size_t k = 0; k < d; ++k) c += t0[k] * t1[k];
    a.off[i] = -std::max(c, 0.0);
  }
  const double shift0 = -std::pow(kTwoPi / static_cast<double>(n), 2);
  EigenResult r = smallest_eigenpair(a, shift0, 1.0);
  r.lambda /= h * h;
  r.residual /= h * h;
  const double scale = 1.0 / std::sqrt(h);
  for (double& p : r.phi) p *= scale;
  r.length = curve.length();
  return r;
}

double rayleigh_quotient_harmonic(const HarmonicField& field) {
  double den = field.norm_squared();
  if (!(den > 0.0)) throw ValidationError("Rayleigh quotient of the zero field");
  return field.dirichlet_energy() / den;
}

double rayleigh_quotient_curve(const DiscreteCurve& curve, std::span<const double> phi) {
  const std::size_t n = curve.size();
  if (phi.size() != n) throw ValidationError("phi size does not match the curve");
  if (!curve.closed()) throw ValidationError("Rayleigh quotient needs a closed curve");
  const double h = curve.spacing();
  auto w = junction_curvature_squared(curve);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    double dphi = phi[j] - phi[i];
    num += (dphi * dphi / (h * h) + w[i] * phi[i] * phi[j]) * h;
    den += phi[i] * phi[i] * h;
  }
  if (!(den > 0.0)) throw ValidationError("Rayleigh quotient of phi = 0");
  return num / den;
}

std::vector<ComponentQuotient> component_rayleigh_quotients(const HarmonicField& field,
                                                            double rel_threshold) {
  const std::size_t n = field.size();
  const auto d = static_cast<std::size_t>(field.dim());
  const double h = field.spacing();
  ZeroSetReport zeros = zero_set(field, rel_threshold);
  if (zeros.measure >= kTwoPi - 0.5 * h) throw ValidationError("zero set covers the whole circle");

  auto link = [&](std::size_t i) {   // |psi_{i+1} - psi_i|^2 / h
    std::size_t j = (i + 1) % n;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += std::pow(field[j][k] - field[i][k], 2);
    return s / h;
  };
  auto mass = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += field[i][k] * field[i][k];
    return s * h;
  };

  std::vector<ComponentQuotient> out;
  if (zeros.intervals.empty()) {
    out.push_back({IndexRange{0, n}, rayleigh_quotient_harmonic(field)});
    return out;
  }
  // complement runs start right after each zero interval
  for (const auto& z : zeros.intervals) {
    std::size_t first = (z.first + z.count) % n;
    std::size_t count = 0;
    while (!zeros.mask[(first + count) % n]) ++count;
    double num = 0.0, den = 0.0;
    // links from the zero sample before the run through the one after it
    for (std::size_t j = 0; j <= count; ++j) num += link((first + n - 1 + j) % n);
    for (std::size_t j = 0; j < count; ++j) den += mass((first + j) % n);
    out.push_back({IndexRange{first, count}, num / den});
  }
  std::sort(out.begin(), out.end(), [](const ComponentQuotient& a, const ComponentQuotient& b) {
    return a.interval.first < b.interval.first;
  });
  return out;
}

ConvergenceStudy convergence_study(const std::function<EigenResult(std::size_t)>& solve,
                                   const std::vector<std::size_t>& grids) {
  if (grids.empty()) throw ValidationError("empty grid list");
  for (std::size_t k = 1; k < grids.size(); ++k)
    if (grids[k] <= grids[k - 1]) throw ValidationError("grid sizes must be strictly increasing");
  ConvergenceStudy st;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < grids.size(); ++k) {
    EigenResult r = solve(grids[k]);
    StudyRow row{grids[k], r.lambda, r.residual, nan};
    if (k >= 2) {
      const auto& r0 = st.rows[k - 2];
      const auto& r1 = st.rows[k - 1];
      double e1 = std::abs(r1.lambda - r0.lambda);
      double e2 = std::abs(r.lambda - r1.lambda);
      row.observed_order = std::log(e1 / e2) / std::log(static_cast<double>(grids[k]) / grids[k - 1]);
    }
    st.rows.push_back(row);
  }
  st.extrapolated = st.rows.back().lambda;
  if (st.rows.size() >= 2) {
    const auto& a = st.rows[st.rows.size() - 2];
    const auto& b = st.rows.back();
    double p = std::isfinite(b.observed_order) && b.observed_order > 0.5 ? b.observed_order : 2.0;
    double ratio = std::pow(static_cast<double>(b.n) / static_cast<double>(a.n), p);
    st.extrapolated = b.lambda + (b.lambda - a.lambda) / (ratio - 1.0);
  }
  return st;
}

}  // namespace ovalab
