#include "ovalab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ovalab/common.hpp"

namespace ovalab {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

void require_samples(std::size_t n) {
  if (n < kMinSamples) {
    std::ostringstream msg;
    msg << "too few samples: " << n << " (need at least " << kMinSamples << ")";
    throw ValidationError(msg.str());
  }
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(std::string("non-finite value in ") + what);
  }
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Unit vector orthogonal to the unit vector `dir`, as close to `hint` as possible.
std::vector<double> orthogonal_unit(std::span<const double> dir, std::span<const double> hint) {
  const std::size_t d = dir.size();
  std::vector<double> out(hint.begin(), hint.end());
  double p = dot(out, dir);
  for (std::size_t k = 0; k < d; ++k) out[k] -= p * dir[k];
  double n = norm(out);
  if (n < 1e-8) {
    // hint parallel to dir: take the coordinate axis least aligned with dir
    std::size_t best = 0;
    for (std::size_t k = 1; k < d; ++k)
      if (std::abs(dir[k]) < std::abs(dir[best])) best = k;
    std::fill(out.begin(), out.end(), 0.0);
    out[best] = 1.0;
    p = dot(out, dir);
    for (std::size_t k = 0; k < d; ++k) out[k] -= p * dir[k];
    n = norm(out);
  }
  for (double& x : out) x /= n;
  return out;
}

std::vector<double> unwrap_angles(const std::vector<double>& raw) {
  std::vector<double> theta(raw.size());
  if (raw.empty()) return theta;
  theta[0] = raw[0];
  for (std::size_t i = 1; i < raw.size(); ++i)
    theta[i] = theta[i - 1] + wrap_angle(raw[i] - theta[i - 1]);
  return theta;
}

}  // namespace

// DiscreteCurve ------------------------------------------------------------

DiscreteCurve DiscreteCurve::planar(std::vector<double> theta, double length) {
  require_samples(theta.size());
  require_finite(theta, "tangent angles");
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("curve length must be positive");
  DiscreteCurve c;
  c.dim_ = 2;
  c.n_ = theta.size();
  c.length_ = length;
  c.tangents_.resize(2 * c.n_);
  for (std::size_t i = 0; i < c.n_; ++i) {
    c.tangents_[2 * i] = std::cos(theta[i]);
    c.tangents_[2 * i + 1] = std::sin(theta[i]);
  }
  c.theta_ = std::move(theta);
  return c;
}

DiscreteCurve DiscreteCurve::spatial(int dim, std::vector<double> tangents, double length) {
  if (dim < 2) throw ValidationError("dimension must be at least 2");
  const auto d = static_cast<std::size_t>(dim);
  if (tangents.size() % d != 0) throw ValidationError("tangent array size is not a multiple of dim");
  const std::size_t n = tangents.size() / d;
  require_samples(n);
  require_finite(tangents, "tangents");
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> t(tangents.data() + i * d, d);
    double nt = norm(t);
    if (std::abs(nt - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "tangent " << i << " is not a unit vector (|t| = " << nt << ")";
      throw ValidationError(msg.str());
    }
    for (double& x : t) x /= nt;
  }
  if (dim == 2) {
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = std::atan2(tangents[2 * i + 1], tangents[2 * i]);
    return planar(unwrap_angles(raw), length);
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("curve length must be positive");
  DiscreteCurve c;
  c.dim_ = dim;
  c.n_ = n;
  c.length_ = length;
  c.tangents_ = std::move(tangents);
  return c;
}

std::span<const double> DiscreteCurve::theta() const {
  if (dim_ != 2) throw ValidationError("tangent angles are only defined for planar curves");
  return theta_;
}

std::vector<double> DiscreteCurve::closure_vector() const {
  const auto d = static_cast<std::size_t>(dim_);
  std::vector<double> sum(d, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < d; ++k) sum[k] += tangents_[i * d + k];
  for (double& x : sum) x *= spacing();
  return sum;
}

double DiscreteCurve::closure_defect() const { return norm(closure_vector()); }

std::vector<double> DiscreteCurve::vertices() const {
  const auto d = static_cast<std::size_t>(dim_);
  const double h = spacing();
  std::vector<double> x((n_ + 1) * d, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < d; ++k) x[(i + 1) * d + k] = x[i * d + k] + h * tangents_[i * d + k];
  return x;
}

DiscreteCurve DiscreteCurve::with_length(double length) const {
  if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("curve length must be positive");
  DiscreteCurve c = *this;
  c.length_ = length;
  return c;
}

// HarmonicField ------------------------------------------------------------

HarmonicField::HarmonicField(int dim, std::vector<double> samples) : dim_(dim), n_(0) {
  if (dim < 2) throw ValidationError("dimension must be at least 2");
  const auto d = static_cast<std::size_t>(dim);
  if (samples.size() % d != 0) throw ValidationError("sample array size is not a multiple of dim");
  n_ = samples.size() / d;
  require_samples(n_);
  require_finite(samples, "harmonic field");
  samples_ = std::move(samples);
}

double HarmonicField::spacing() const { return kTwoPi / static_cast<double>(n_); }

double HarmonicField::magnitude(std::size_t i) const { return norm((*this)[i]); }

double HarmonicField::max_magnitude() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) m = std::max(m, magnitude(i));
  return m;
}

double HarmonicField::min_magnitude() const {
  double m = magnitude(0);
  for (std::size_t i = 1; i < n_; ++i) m = std::min(m, magnitude(i));
  return m;
}

double HarmonicField::norm_squared() const {
  double s = 0.0;
  for (double x : samples_) s += x * x;
  return s * spacing();
}

double HarmonicField::dirichlet_energy() const {
  const auto d = static_cast<std::size_t>(dim_);
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = (i + 1) % n_;
    for (std::size_t k = 0; k < d; ++k) {
      double diff = samples_[j * d + k] - samples_[i * d + k];
      s += diff * diff;
    }
  }
  return s / spacing();
}

// Conversions --------------------------------------------------------------

DiscreteCurve curve_from_tangent_angles(std::span<const double> theta, double length) {
  return DiscreteCurve::planar(std::vector<double>(theta.begin(), theta.end()), length);
}

ClosureProjection project_to_closure(std::span<const double> theta,
                                     const std::vector<bool>& frozen) {
  const std::size_t n = theta.size();
  require_samples(n);
  require_finite(theta, "tangent angles");
  if (!frozen.empty() && frozen.size() != n) throw ValidationError("frozen mask size mismatch");
  auto free = [&](std::size_t i) { return frozen.empty() || !frozen[i]; };

  ClosureProjection out;
  out.theta.assign(theta.begin(), theta.end());
  auto residual = [&](const std::vector<double>& th, double& fc, double& fs) {
    fc = 0.0;
    fs = 0.0;
    for (double t : th) {
      fc += std::cos(t);
      fs += std::sin(t);
    }
    return std::max(std::abs(fc), std::abs(fs));
  };

  double fc, fs;
  double res = residual(out.theta, fc, fs);
  const double target = 1e-12;
  const double accept = 1e-10;
  const int max_iter = 50;
  while (res > target && out.iterations < max_iter) {
    // Gauss-Newton step of minimal norm: delta = -J^T (J J^T)^{-1} F with
    // J rows (-sin theta_i, cos theta_i) restricted to free indices.
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!free(i)) continue;
      double s = std::sin(out.theta[i]), c = std::cos(out.theta[i]);
      a11 += s * s;
      a12 -= s * c;
      a22 += c * c;
    }
    double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 1e-14 * (a11 + a22) * (a11 + a22))) {
      double pert = 0.0;
      for (std::size_t i = 0; i < n; ++i) pert += std::pow(out.theta[i] - theta[i], 2);
      std::ostringstream msg;
      msg << "closure projection is singular (tangent angles collinear); closure residual "
          << res << ", perturbation so far " << std::sqrt(pert * kTwoPi / static_cast<double>(n));
      throw NumericalError(msg.str());
    }
    double y1 = (a22 * fc - a12 * fs) / det;
    double y2 = (-a12 * fc + a11 * fs) / det;
    std::vector<double> trial(n);
    double step = 1.0;
    double trial_res = res;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < n; ++i) {
        double delta = 0.0;
        if (free(i)) delta = -(-std::sin(out.theta[i]) * y1 + std::cos(out.theta[i]) * y2);
        trial[i] = out.theta[i] + step * delta;
      }
      double tc, ts;
      trial_res = residual(trial, tc, ts);
      if (trial_res < res || trial_res <= target) {
        fc = tc;
        fs = ts;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!(trial_res < res)) break;   // stagnated at round-off
    out.theta = std::move(trial);
    res = trial_res;
  }
  double pert = 0.0;
  for (std::size_t i = 0; i < n; ++i) pert += std::pow(out.theta[i] - theta[i], 2);
  out.perturbation = std::sqrt(pert * kTwoPi / static_cast<double>(n));
  if (res > accept) {
    std::ostringstream msg;
    msg << "closure projection did not converge: residual " << res << " after " << out.iterations
        << " iterations, perturbation " << out.perturbation;
    throw NumericalError(msg.str());
  }
  return out;
}

CurvatureProfile curvature_profile(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  CurvatureProfile out;
  out.kappa.resize(n);
  out.signed_kappa.resize(n);
  if (curve.planar()) {
    auto th = curve.theta();
    for (std::size_t i = 0; i < n; ++i) {
      double fwd = wrap_angle(th[(i + 1) % n] - th[i]);
      double bwd = wrap_angle(th[i] - th[(i + n - 1) % n]);
      out.signed_kappa[i] = (fwd + bwd) / (2.0 * h);
      out.kappa[i] = std::abs(out.signed_kappa[i]);
    }
    return out;
  }
  const auto d = static_cast<std::size_t>(curve.dim());
  for (std::size_t i = 0; i < n; ++i) {
    auto tp = curve.tangent((i + 1) % n);
    auto tm = curve.tangent((i + n - 1) % n);
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += std::pow(tp[k] - tm[k], 2);
    out.kappa[i] = std::sqrt(s) / (2.0 * h);
    out.signed_kappa[i] = out.kappa[i];
  }
  return out;
}

std::vector<double> junction_curvature_squared(const DiscreteCurve& curve) {
  const std::size_t n = curve.size();
  const auto d = static_cast<std::size_t>(curve.dim());
  const double h2 = curve.spacing() * curve.spacing();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto a = curve.tangent(i);
    auto b = curve.tangent((i + 1) % n);
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += std::pow(b[k] - a[k], 2);
    w[i] = s / h2;
  }
  return w;
}

HarmonicField to_harmonic(const DiscreteCurve& curve, std::span<const double> phi) {
  if (phi.size() != curve.size()) throw ValidationError("phi size does not match the curve");
  require_finite(phi, "phi");
  for (double p : phi)
    if (p < 0.0) throw ValidationError("phi must be nonnegative");
  if (!curve.closed()) {
    std::ostringstream msg;
    msg << "curve is not closed (defect " << curve.closure_defect() << ")";
    throw ValidationError(msg.str());
  }
  const auto d = static_cast<std::size_t>(curve.dim());
  std::vector<double> psi(curve.size() * d);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    auto t = curve.tangent(i);
    for (std::size_t k = 0; k < d; ++k) psi[i * d + k] = t[k] * phi[i];
  }
  return HarmonicField(curve.dim(), std::move(psi));
}

ZeroSetReport zero_set(const HarmonicField& field, double rel_threshold) {
  if (!(rel_threshold >= 0.0)) throw ValidationError("zero threshold must be nonnegative");
  const std::size_t n = field.size();
  const auto d = static_cast<std::size_t>(field.dim());
  const double h = field.spacing();
  const double cut = rel_threshold * field.max_magnitude();

  ZeroSetReport rep;
  rep.mask.assign(n, false);
  rep.loop_integral.assign(d, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double m = field.magnitude(i);
    if (m <= cut) {   // '<=' so that the zero field is entirely zero set
      rep.mask[i] = true;
      ++count;
      continue;
    }
    auto p = field[i];
    for (std::size_t k = 0; k < d; ++k) rep.loop_integral[k] += h * p[k] / m;
  }
  rep.measure = h * static_cast<double>(count);
  rep.residual = norm(rep.loop_integral) - rep.measure;

  if (count == n) {
    rep.intervals.push_back({0, n});
  } else if (count > 0) {
    // start scanning right after a non-zero sample so cyclic runs are not split
    std::size_t start = 0;
    while (rep.mask[start]) ++start;
    std::size_t i = 0;
    while (i < n) {
      std::size_t idx = (start + i) % n;
      if (!rep.mask[idx]) {
        ++i;
        continue;
      }
      IndexRange r{idx, 0};
      while (i < n && rep.mask[(start + i) % n]) {
        ++r.count;
        ++i;
      }
      rep.intervals.push_back(r);
    }
    std::sort(rep.intervals.begin(), rep.intervals.end(),
              [](const IndexRange& a, const IndexRange& b) { return a.first < b.first; });
  }
  return rep;
}

bool admissible(const HarmonicField& field, double rel_threshold) {
  if (field.max_magnitude() == 0.0) return false;
  return zero_set(field, rel_threshold).residual <= kLoopTolerance;
}

CurveRecovery from_harmonic(const HarmonicField& field, double rel_threshold) {
  if (field.max_magnitude() == 0.0) throw ValidationError("zero field has no associated curve");
  const std::size_t n = field.size();
  const auto d = static_cast<std::size_t>(field.dim());
  ZeroSetReport zeros = zero_set(field, rel_threshold);
  if (zeros.residual > kLoopTolerance) {
    std::ostringstream msg;
    msg << "weak loop condition violated: |loop integral| - measure = " << zeros.residual;
    throw ValidationError(msg.str());
  }

  std::vector<double> tangents(n * d, 0.0);
  std::vector<double> phi(n);
  std::vector<std::size_t> zero_idx;
  std::vector<double> v(d, 0.0);   // minus the sum of the defined unit tangents
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = field.magnitude(i);
    if (zeros.mask[i]) {
      zero_idx.push_back(i);
      continue;
    }
    auto p = field[i];
    for (std::size_t k = 0; k < d; ++k) {
      tangents[i * d + k] = p[k] / phi[i];
      v[k] -= tangents[i * d + k];
    }
  }

  // The free unit tangents on the zero set must add up to v. If |v| equals
  // their count they all point along v (a straight chord); with slack they
  // form a two-leg tent around v.
  const std::size_t m = zero_idx.size();
  if (m > 0) {
    std::vector<double> hint(d, 0.0);
    {
      std::size_t prev = (zero_idx.front() + n - 1) % n;
      while (zeros.mask[prev] && prev != zero_idx.front()) prev = (prev + n - 1) % n;
      if (!zeros.mask[prev]) {
        for (std::size_t k = 0; k < d; ++k) hint[k] = tangents[prev * d + k];
      } else {
        hint[0] = 1.0;
      }
    }
    auto assign = [&](std::size_t idx, std::span<const double> u) {
      for (std::size_t k = 0; k < d; ++k) tangents[idx * d + k] = u[k];
    };
    const double tight = 1e-9 * static_cast<double>(m);
    double vn = norm(v);
    std::size_t next = 0;
    if (vn >= static_cast<double>(m) - tight) {
      std::vector<double> u(d);
      for (std::size_t k = 0; k < d; ++k) u[k] = v[k] / vn;
      for (std::size_t idx : zero_idx) assign(idx, u);
    } else {
      if (m == 1) {
        std::ostringstream msg;
        msg << "cannot close with a single zero sample and loop slack " << (1.0 - vn);
        throw NumericalError(msg.str());
      }
      std::vector<double> dir(d);
      if (vn > 1e-12) {
        for (std::size_t k = 0; k < d; ++k) dir[k] = v[k] / vn;
      } else {
        dir = hint;
      }
      if (m % 2 == 1) {
        assign(zero_idx[next++], dir);
        for (std::size_t k = 0; k < d; ++k) v[k] -= dir[k];
        vn = norm(v);
        if (vn > 1e-12)
          for (std::size_t k = 0; k < d; ++k) dir[k] = v[k] / vn;
      }
      const double legs = static_cast<double>(m - next);
      std::vector<double> w(d), up(d), um(d);
      for (std::size_t k = 0; k < d; ++k) w[k] = v[k] / legs;
      double wn = norm(w);
      std::vector<double> perp;
      if (vn > 1e-12) {
        perp = orthogonal_unit(dir, hint);
      } else {
        perp = dir;   // v = 0: the legs point along +-hint
      }
      double lift = std::sqrt(std::max(0.0, 1.0 - wn * wn));
      for (std::size_t k = 0; k < d; ++k) {
        up[k] = w[k] + lift * perp[k];
        um[k] = w[k] - lift * perp[k];
      }
      const std::size_t half = (m - next) / 2;
      for (std::size_t j = 0; j < half; ++j) assign(zero_idx[next + j], up);
      for (std::size_t j = half; j < m - next; ++j) assign(zero_idx[next + j], um);
    }
  }

  CurveRecovery out{DiscreteCurve::spatial(field.dim(), std::move(tangents), kTwoPi), std::move(phi),
                    zeros, 0.0};
  out.slack = zeros.measure - norm(zeros.loop_integral);
  return out;
}

// Double tangents ----------------------------------------------------------

DoubleTangentScan double_tangent(const DiscreteCurve& curve, int directions) {
  if (!curve.planar()) throw ValidationError("double_tangent requires a planar curve");
  if (directions < 360) throw ValidationError("at least 360 scan directions are required");
  if (!curve.closed()) throw ValidationError("double_tangent requires a closed curve");
  const std::size_t n = curve.size();
  auto th = curve.theta();

  DoubleTangentScan out;
  bool pos = true, neg = true;
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dth = wrap_angle(th[(i + 1) % n] - th[i]);
    turning += dth;
    pos = pos && dth > 0.0;
    neg = neg && dth < 0.0;
  }
  out.total_turning = turning;
  out.monotone = (pos || neg) && std::abs(std::abs(turning) - kTwoPi) < 1e-6;
  if (out.monotone) return out;   // strictly monotone angle: convex, no bridge

  auto verts = curve.vertices();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = verts[2 * i];
    ys[i] = verts[2 * i + 1];
  }
  double diam = 0.0;
  {
    auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    diam = std::hypot(*xmax - *xmin, *ymax - *ymin);
  }
  const double tol = 1e-12 * diam;

  // Support points over the direction scan n_j = (cos a_j, sin a_j).
  auto support = [&](double ca, double sa) {
    std::size_t best = 0;
    double bv = xs[0] * ca + ys[0] * sa;
    for (std::size_t i = 1; i < n; ++i) {
      double val = xs[i] * ca + ys[i] * sa;
      if (val > bv) {
        bv = val;
        best = i;
      }
    }
    return best;
  };
  auto gap = [&](std::size_t a, std::size_t b) {
    std::size_t g = a > b ? a - b : b - a;
    return std::min(g, n - g);
  };

  struct Candidate {
    std::size_t a, b;
    double depth;
    double nx, ny;
  };
  std::vector<Candidate> found;

  // Between two scan directions whose support points are not neighbours
  // the support jumps across one or more hull edges. Each hull edge (a, b)
  // is resolved exactly: its outward normal is the candidate direction,
  // and if nothing lies beyond the edge it is a supporting line touching
  // at a and b.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  std::vector<std::size_t> scan(static_cast<std::size_t>(directions));
  for (int j = 0; j < directions; ++j) {
    double ang = kTwoPi * j / directions;
    scan[static_cast<std::size_t>(j)] = support(std::cos(ang), std::sin(ang));
  }
  for (std::size_t j = 0; j < scan.size(); ++j) {
    std::size_t a = scan[j], b = scan[(j + 1) % scan.size()];
    if (a != b) stack.emplace_back(a, b);
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    double ex = xs[b] - xs[a], ey = ys[b] - ys[a];
    double el = std::hypot(ex, ey);
    if (el <= tol) continue;
    double nx = ey / el, ny = -ex / el;   // outward for counter-clockwise hull order
    std::size_t c = support(nx, ny);
    double base = xs[a] * nx + ys[a] * ny;
    double over = xs[c] * nx + ys[c] * ny - base;
    if (over > tol && c != a && c != b) {
      stack.emplace_back(a, c);
      stack.emplace_back(c, b);
    } else {
      edges.emplace_back(a, b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  for (auto [a, b] : edges) {
    if (gap(a, b) < 2) continue;
    double ex = xs[b] - xs[a], ey = ys[b] - ys[a];
    double el = std::hypot(ex, ey);
    if (el < 1e-6 * diam) continue;   // coincident points, not a genuine pair of touch points
    double nx = ey / el, ny = -ex / el;
    double base = xs[a] * nx + ys[a] * ny;
    // pocket depth along the shorter index arc between a and b
    std::size_t lo = std::min(a, b), hi = std::max(a, b);
    double depth = 0.0;
    if (hi - lo <= n - (hi - lo)) {
      for (std::size_t i = lo; i <= hi; ++i) depth = std::max(depth, base - (xs[i] * nx + ys[i] * ny));
    } else {
      for (std::size_t i = hi; i <= lo + n; ++i) {
        std::size_t k = i % n;
        depth = std::max(depth, base - (xs[k] * nx + ys[k] * ny));
      }
    }
    found.push_back({lo, hi, depth, nx, ny});
  }
  if (found.empty()) return out;
  auto best = std::max_element(found.begin(), found.end(), [](const Candidate& p, const Candidate& q) {
    return p.depth < q.depth;
  });
  const double h = curve.spacing();
  DoubleTangent dt;
  dt.first_vertex = best->a;
  dt.second_vertex = best->b;
  dt.s1 = h * static_cast<double>(best->a);
  dt.s2 = h * static_cast<double>(best->b);
  dt.line.point = {xs[best->a], ys[best->a]};
  dt.line.normal = {best->nx, best->ny};
  out.tangent = dt;
  return out;
}

DiscreteCurve reflect_segment(const DiscreteCurve& curve, std::size_t first_vertex,
                              std::size_t second_vertex, const Mirror& mirror) {
  const std::size_t n = curve.size();
  const auto d = static_cast<std::size_t>(curve.dim());
  if (first_vertex == second_vertex) throw ValidationError("reflection arc is empty (s1 = s2)");
  if (first_vertex > second_vertex || second_vertex > n)
    throw ValidationError("reflection arc must satisfy first < second <= N");
  if (mirror.point.size() != d || mirror.normal.size() != d)
    throw ValidationError("mirror dimension does not match the curve");
  double nn = norm(mirror.normal);
  if (!(nn > 0.0)) throw ValidationError("mirror normal is zero");
  std::vector<double> nu(mirror.normal);
  for (double& x : nu) x /= nn;

  auto verts = curve.vertices();
  const double tol = std::max(curve.closure_tolerance(), 1e-10);
  for (std::size_t v : {first_vertex, second_vertex}) {
    double off = 0.0;
    for (std::size_t k = 0; k < d; ++k) off += (verts[v * d + k] - mirror.point[k]) * nu[k];
    if (std::abs(off) > tol) {
      std::ostringstream msg;
      msg << "vertex " << v << " is off the mirror by " << off;
      throw ValidationError(msg.str());
    }
  }

  if (curve.planar()) {
    std::vector<double> th(curve.theta().begin(), curve.theta().end());
    const double beta = std::atan2(nu[1], nu[0]) + 0.5 * kPi;   // mirror line direction
    for (std::size_t i = first_vertex; i < second_vertex; ++i) th[i] = 2.0 * beta - th[i];
    return DiscreteCurve::planar(std::move(th), curve.length());
  }
  std::vector<double> t(curve.tangents().begin(), curve.tangents().end());
  for (std::size_t i = first_vertex; i < second_vertex; ++i) {
    std::span<double> ti(t.data() + i * d, d);
    double p = dot(ti, nu);
    for (std::size_t k = 0; k < d; ++k) ti[k] -= 2.0 * p * nu[k];
  }
  return DiscreteCurve::spatial(curve.dim(), std::move(t), curve.length());
}

}  // namespace ovalab
