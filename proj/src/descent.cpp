#include "ovalab/descent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ovalab/common.hpp"
#include "ovalab/spectrum.hpp"
#include "ovalab/tridiagonal.hpp"

namespace ovalab {

namespace {

using Vec = std::vector<double>;

double inner(const Vec& a, const Vec& b, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * h;
}

void check_floor(const HarmonicField& f) {
  if (f.min_magnitude() < kPsiFloor * f.max_magnitude())
    throw NumericalError("field is approaching its zero set (|psi| below floor)");
}

Vec second_difference(const HarmonicField& f) {
  const std::size_t n = f.size();
  const auto d = static_cast<std::size_t>(f.dim());
  const double h2 = f.spacing() * f.spacing();
  Vec out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = f[(i + n - 1) % n], c = f[i], q = f[(i + 1) % n];
    for (std::size_t k = 0; k < d; ++k) out[i * d + k] = (q[k] - 2.0 * c[k] + p[k]) / h2;
  }
  return out;
}

// Constraint gradients in L2_h: psi itself, then P_i e_k / |psi_i| per axis k.
std::vector<Vec> constraint_columns(const HarmonicField& f) {
  const std::size_t n = f.size();
  const auto d = static_cast<std::size_t>(f.dim());
  std::vector<Vec> cols(d + 1, Vec(n * d));
  auto s = f.samples();
  std::copy(s.begin(), s.end(), cols[0].begin());
  for (std::size_t i = 0; i < n; ++i) {
    auto p = f[i];
    double r = f.magnitude(i);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        double proj = (j == k ? 1.0 : 0.0) - p[j] * p[k] / (r * r);
        cols[k + 1][i * d + j] = proj / r;
      }
    }
  }
  return cols;
}

Eigen::MatrixXd gram(const std::vector<Vec>& cols, double h) {
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a; b < m; ++b) g(a, b) = g(b, a) = inner(cols[a], cols[b], h);
  return g;
}

HarmonicField with_samples(const HarmonicField& like, Vec samples) {
  return HarmonicField(like.dim(), std::move(samples));
}

}  // namespace

std::string to_string(DescentVerdict v) {
  switch (v) {
    case DescentVerdict::converged: return "converged";
    case DescentVerdict::max_iter: return "max_iter";
    case DescentVerdict::zero_set_approach: return "zero_set_approach";
    case DescentVerdict::stagnation: return "stagnation";
  }
  return "unknown";
}

double loop_residual(const HarmonicField& f) {
  const auto d = static_cast<std::size_t>(f.dim());
  Vec g(d, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double r = f.magnitude(i);
    if (r == 0.0) continue;
    for (std::size_t k = 0; k < d; ++k) g[k] += f[i][k] / r;
  }
  double s = 0.0;
  for (double x : g) s += x * x;
  return std::sqrt(s) * f.spacing();
}

Multipliers multipliers_and_residual(const HarmonicField& f) {
  check_floor(f);
  const double h = f.spacing();
  const auto d = static_cast<std::size_t>(f.dim());
  Vec lap = second_difference(f);
  auto cols = constraint_columns(f);
  Eigen::MatrixXd g = gram(cols, h);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(d + 1));
  for (std::size_t a = 0; a <= d; ++a) rhs(static_cast<Eigen::Index>(a)) = -inner(cols[a], lap, h);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13)
    throw NumericalError("multiplier normal equations are singular (degenerate field)");
  Eigen::VectorXd x = ldlt.solve(rhs);

  Multipliers m;
  m.lambda = x(0);
  m.mu.resize(d);
  for (std::size_t k = 0; k < d; ++k) m.mu[k] = x(static_cast<Eigen::Index>(k + 1));
  m.residual = lap;
  for (std::size_t a = 0; a <= d; ++a)
    for (std::size_t i = 0; i < lap.size(); ++i) m.residual[i] += x(static_cast<Eigen::Index>(a)) * cols[a][i];
  m.el_residual = std::sqrt(inner(m.residual, m.residual, h));
  return m;
}

std::vector<double> gradient(const HarmonicField& f, double lambda, const std::vector<double>& mu) {
  check_floor(f);
  const auto d = static_cast<std::size_t>(f.dim());
  if (mu.size() != d) throw ValidationError("mu dimension does not match the field");
  Vec g = second_difference(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto p = f[i];
    double r = f.magnitude(i);
    double mp = 0.0;
    for (std::size_t k = 0; k < d; ++k) mp += mu[k] * p[k];
    for (std::size_t k = 0; k < d; ++k) {
      double& gi = g[i * d + k];
      gi += lambda * p[k] + mu[k] / r - mp * p[k] / (r * r * r);
      gi *= -2.0;
    }
  }
  return g;
}

std::vector<double> gradient(const HarmonicField& f) {
  if (std::abs(f.norm_squared() - 1.0) > 1e-8)
    throw ValidationError("gradient expects a unit-norm field; project it first");
  Multipliers m = multipliers_and_residual(f);
  Vec g = std::move(m.residual);
  for (double& x : g) x *= -2.0;
  return g;
}

std::vector<double> rq_gradient(const HarmonicField& f) {
  const double nrm = f.norm_squared();
  if (!(nrm > 0.0)) throw ValidationError("Rayleigh quotient of the zero field");
  const double rq = rayleigh_quotient_harmonic(f);
  Vec g = second_difference(f);
  auto s = f.samples();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (-2.0 * g[i] - 2.0 * rq * s[i]) / nrm;
  return g;
}

HarmonicField project_constraints(const HarmonicField& field) {
  if (!(field.max_magnitude() > 0.0)) throw ValidationError("cannot project the zero field");
  const std::size_t n = field.size();
  const auto d = static_cast<std::size_t>(field.dim());
  const double h = field.spacing();

  Vec psi(field.samples().begin(), field.samples().end());
  auto normalize = [&](Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    double scale = 1.0 / std::sqrt(s * h);
    for (double& x : v) x *= scale;
  };
  normalize(psi);

  for (int it = 0; it <= 50; ++it) {
    HarmonicField cur(field.dim(), psi);
    double res = loop_residual(cur);
    if (res < kProjectionTol) return cur;
    if (it == 50) break;
    check_floor(cur);
    // G(psi) = h sum psi_i/|psi_i|, dG[delta] = h sum P_i delta_i / |psi_i|
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
      auto p = cur[i];
      double r = cur.magnitude(i);
      for (std::size_t a = 0; a < d; ++a) {
        g(static_cast<Eigen::Index>(a)) += h * p[a] / r;
        for (std::size_t b = 0; b < d; ++b) {
          double proj = (a == b ? 1.0 : 0.0) - p[a] * p[b] / (r * r);
          jac(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += h * proj / (r * r);
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.rank() < static_cast<Eigen::Index>(d) || lu.rcond() < 1e-12)
      throw NumericalError("loop-constraint projection is infeasible (singular Jacobian)");
    Eigen::VectorXd c = lu.solve(-g);
    // damped step: shrink until the loop residual decreases
    double t = 1.0;
    Vec trial(psi.size());
    bool accepted = false;
    for (int ls = 0; ls < 30 && !accepted; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) {
        auto p = cur[i];
        double r = cur.magnitude(i);
        double cp = 0.0;
        for (std::size_t a = 0; a < d; ++a) cp += c(static_cast<Eigen::Index>(a)) * p[a];
        for (std::size_t a = 0; a < d; ++a)
          trial[i * d + a] = psi[i * d + a] + t * (c(static_cast<Eigen::Index>(a)) - cp * p[a] / (r * r)) / r;
      }
      normalize(trial);
      HarmonicField tf(field.dim(), trial);
      if (tf.min_magnitude() > kPsiFloor * tf.max_magnitude() && loop_residual(tf) < res) accepted = true;
    }
    if (!accepted) {
      if (res < 1e-10) return cur;
      std::ostringstream msg;
      msg << "loop-constraint projection stalled at residual " << res;
      throw NumericalError(msg.str());
    }
    psi = trial;
  }
  HarmonicField cur(field.dim(), psi);
  double res = loop_residual(cur);
  if (res < 1e-10) return cur;
  std::ostringstream msg;
  msg << "loop-constraint projection did not converge in 50 iterations (residual " << res << ")";
  throw NumericalError(msg.str());
}

DescentResult minimize(const HarmonicField& init, const DescentOptions& opts) {
  if (!(opts.tol > 0.0) || !(opts.step0 > 0.0)) throw ValidationError("tol and step0 must be positive");
  if (init.min_magnitude() < kPsiFloor * init.max_magnitude())
    throw ValidationError("initial field touches its zero set; descent needs |psi| > 0");
  const std::size_t n = init.size();
  const auto d = static_cast<std::size_t>(init.dim());
  const double h = init.spacing();

  DescentResult out{project_constraints(init), {}, DescentVerdict::max_iter};

  SymTridiagonal sobolev;
  sobolev.periodic = true;
  sobolev.diag.assign(n, 2.0 / (h * h) + 1.0);
  sobolev.off.assign(n, -1.0 / (h * h));

  double step = opts.step0;
  double rq = rayleigh_quotient_harmonic(out.field);
  for (std::size_t iter = 0;; ++iter) {
    Multipliers m = multipliers_and_residual(out.field);
    DescentState st;
    st.iter = iter;
    st.rq = rq;
    st.lambda_est = m.lambda;
    st.mu_est = m.mu;
    st.loop_residual = loop_residual(out.field);
    st.el_residual = m.el_residual;
    st.step = iter == 0 ? 0.0 : step;
    out.trace.push_back(st);
    if (m.el_residual < opts.tol) {
      out.verdict = DescentVerdict::converged;
      break;
    }
    if (iter >= opts.max_iter) {
      out.verdict = DescentVerdict::max_iter;
      break;
    }

    // descent direction: 2 r, optionally smoothed, then made tangent
    Vec dir(m.residual.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = 2.0 * m.residual[i];
    if (opts.precondition) {
      Vec comp(n);
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < n; ++i) comp[i] = dir[i * d + k];
        Vec sol = solve_shifted(sobolev, 0.0, comp);
        for (std::size_t i = 0; i < n; ++i) dir[i * d + k] = sol[i];
      }
      auto cols = constraint_columns(out.field);
      Eigen::MatrixXd g = gram(cols, h);
      Eigen::VectorXd b(static_cast<Eigen::Index>(cols.size()));
      for (std::size_t a = 0; a < cols.size(); ++a) b(static_cast<Eigen::Index>(a)) = inner(cols[a], dir, h);
      Eigen::VectorXd coef = g.ldlt().solve(b);
      for (std::size_t a = 0; a < cols.size(); ++a)
        for (std::size_t i = 0; i < dir.size(); ++i) dir[i] -= coef(static_cast<Eigen::Index>(a)) * cols[a][i];
    }
    Vec grad = rq_gradient(out.field);
    const double slope = inner(grad, dir, h);
    if (!(slope < 0.0)) {
      out.verdict = DescentVerdict::stagnation;
      break;
    }

    auto cur = out.field.samples();
    bool accepted = false;
    bool zero_hit = false;
    double t = std::min(4.0 * step, 1e3 * opts.step0);
    if (iter == 0) t = opts.step0;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Vec trial(cur.begin(), cur.end());
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += t * dir[i];
      HarmonicField tf = with_samples(out.field, std::move(trial));
      if (tf.min_magnitude() < kPsiFloor * tf.max_magnitude()) {
        zero_hit = true;
        break;
      }
      HarmonicField proj = [&] {
        try {
          return project_constraints(tf);
        } catch (const NumericalError&) {
          return tf;
        }
      }();
      if (loop_residual(proj) > 1e-10) continue;
      double rq_new = rayleigh_quotient_harmonic(proj);
      if (rq_new <= rq + 1e-4 * t * slope) {
        out.field = std::move(proj);
        rq = rq_new;
        step = t;
        accepted = true;
        break;
      }
    }
    if (zero_hit) {
      out.verdict = DescentVerdict::zero_set_approach;
      break;
    }
    if (!accepted) {
      out.verdict = DescentVerdict::stagnation;
      break;
    }
  }
  return out;
}

}  // namespace ovalab
