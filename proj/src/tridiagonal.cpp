#include "ovalab/tridiagonal.hpp"

#include "ovalab/common.hpp"

namespace ovalab {
namespace {

void check_shape(const SymTridiagonal& a) {
  const std::size_t n = a.size();
  const std::size_t want = a.periodic ? n : (n ? n - 1 : 0);
  if (a.off.size() != want) throw ValidationError("tridiagonal: off-diagonal has the wrong length");
}

// Thomas algorithm for a (non-periodic) tridiagonal system with
// sub = super = off (symmetric) and diagonal d.
std::vector<double> thomas(std::span<const double> d, std::span<const double> off,
                           std::span<const double> rhs) {
  const std::size_t n = d.size();
  std::vector<double> c(n, 0.0);
  std::vector<double> x(rhs.begin(), rhs.end());
  double beta = d[0];
  x[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = off[i - 1] / beta;
    beta = d[i] - off[i - 1] * c[i - 1];
    x[i] = (x[i] - off[i - 1] * x[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace

std::vector<double> multiply(const SymTridiagonal& a, std::span<const double> x) {
  check_shape(a);
  const std::size_t n = a.size();
  if (x.size() != n) throw ValidationError("multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = a.diag[i] * x[i];
    if (i + 1 < n) v += a.off[i] * x[i + 1];
    if (i > 0) v += a.off[i - 1] * x[i - 1];
    y[i] = v;
  }
  if (a.periodic && n > 2) {
    y[0] += a.off[n - 1] * x[n - 1];
    y[n - 1] += a.off[n - 1] * x[0];
  }
  return y;
}

std::vector<double> solve_shifted(const SymTridiagonal& a, double shift,
                                  std::span<const double> rhs) {
  check_shape(a);
  const std::size_t n = a.size();
  if (rhs.size() != n) throw ValidationError("solve_shifted: size mismatch");
  if (n < 3) throw ValidationError("solve_shifted: need at least 3 unknowns");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a.diag[i] - shift;

  if (!a.periodic) return thomas(d, a.off, rhs);

  // A = T + u v^T with u = (gamma, 0, ..., 0, corner),
  // v = (1, 0, ..., 0, corner / gamma).
  const double corner = a.off[n - 1];
  const double gamma = d[0] == 0.0 ? -1.0 : -d[0];
  d[0] -= gamma;
  d[n - 1] -= corner * corner / gamma;
  std::span<const double> inner(a.off.data(), n - 1);

  const std::vector<double> y = thomas(d, inner, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner;
  const std::vector<double> z = thomas(d, inner, u);

  const double vy = y[0] + corner / gamma * y[n - 1];
  const double vz = z[0] + corner / gamma * z[n - 1];
  const double factor = vy / (1.0 + vz);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
  return x;
}

}  // namespace ovalab
