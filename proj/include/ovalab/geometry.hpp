#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ovalab {

inline constexpr std::size_t kMinSamples = 16;
inline constexpr double kClosureTolFactor = 1e-8;   // closure_tol = factor * length
inline constexpr double kDefaultZeroThreshold = 1e-6;
inline constexpr double kLoopTolerance = 1e-7;   // absolute, in 2 pi units

/// Closed (or open) curve sampled uniformly in arclength.
///
/// Sample i carries the unit tangent of the polygon edge that starts at
/// s_i = i * length / N, so the curve is the equilateral polygon with
/// vertices x_0 = 0, x_{i+1} = x_i + h t_i. Planar curves are stored as
/// tangent angles; the Cartesian tangents are derived from them.
class DiscreteCurve {
 public:
  static DiscreteCurve planar(std::vector<double> theta, double length);
  /// `tangents` is row-major N x dim. Rows are renormalized if they are
  /// within 1e-9 of unit length; otherwise ValidationError.
  static DiscreteCurve spatial(int dim, std::vector<double> tangents, double length);

  int dim() const { return dim_; }
  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  bool planar() const { return dim_ == 2; }

  /// Tangent angles; planar curves only.
  std::span<const double> theta() const;
  std::span<const double> tangent(std::size_t i) const {
    return {tangents_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> tangents() const { return tangents_; }

  /// h * sum_i t_i
  std::vector<double> closure_vector() const;
  double closure_defect() const;
  double closure_tolerance() const { return kClosureTolFactor * length_; }
  bool closed() const { return closure_defect() < closure_tolerance(); }

  /// Polygon vertices, (N + 1) x dim row-major, starting at the origin.
  std::vector<double> vertices() const;

  /// Same shape with a different total length (uniform dilation).
  DiscreteCurve with_length(double length) const;

 private:
  DiscreteCurve() = default;

  int dim_ = 2;
  std::size_t n_ = 0;
  double length_ = 0.0;
  std::vector<double> theta_;
  std::vector<double> tangents_;
};

/// Samples psi(s_i), s_i = 2 pi i / N, of a map S^1 -> R^n.
class HarmonicField {
 public:
  HarmonicField(int dim, std::vector<double> samples);

  int dim() const { return dim_; }
  std::size_t size() const { return n_; }
  double spacing() const;

  std::span<const double> operator[](std::size_t i) const {
    return {samples_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  std::span<double> operator[](std::size_t i) {
    return {samples_.data() + i * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }

  double magnitude(std::size_t i) const;
  double max_magnitude() const;
  double min_magnitude() const;
  /// Discrete L2 norm squared, h * sum |psi_i|^2.
  double norm_squared() const;
  /// Discrete Dirichlet energy, sum |psi_{i+1} - psi_i|^2 / h.
  double dirichlet_energy() const;

 private:
  int dim_;
  std::size_t n_;
  std::vector<double> samples_;
};

/// Cyclic run of sample indices [first, first + count) mod N.
struct IndexRange {
  std::size_t first = 0;
  std::size_t count = 0;
};

struct ZeroSetReport {
  double measure = 0.0;                 // grid measure of the detected zero set
  std::vector<IndexRange> intervals;
  std::vector<double> loop_integral;    // h * sum sgn(psi_i)
  double residual = 0.0;                // |loop_integral| - measure
  std::vector<bool> mask;               // mask[i]: sample i in the zero set
};

struct ClosureProjection {
  std::vector<double> theta;
  double perturbation = 0.0;   // discrete L2 norm of the correction
  int iterations = 0;
};

struct CurvatureProfile {
  std::vector<double> kappa;          // |curvature| at samples
  std::vector<double> signed_kappa;   // theta' for planar curves, equal to kappa otherwise
};

struct CurveRecovery {
  DiscreteCurve curve;
  std::vector<double> phi;
  ZeroSetReport zeros;
  double slack = 0.0;   // measure - |loop integral| (>= 0 when admissible)
};

/// Reflection hyperplane (a line in the plane): {x : (x - point) . normal = 0}.
struct Mirror {
  std::vector<double> point;
  std::vector<double> normal;   // unit
};

struct DoubleTangent {
  std::size_t first_vertex = 0;
  std::size_t second_vertex = 0;
  double s1 = 0.0;
  double s2 = 0.0;
  Mirror line;
};

struct DoubleTangentScan {
  std::optional<DoubleTangent> tangent;
  bool monotone = false;       // strictly monotone tangent angle
  double total_turning = 0.0;
};

DiscreteCurve curve_from_tangent_angles(std::span<const double> theta, double length);

/// Minimal-norm correction of planar tangent angles so that
/// sum cos = sum sin = 0 to 1e-12. Indices with frozen[i] set are kept.
ClosureProjection project_to_closure(std::span<const double> theta,
                                     const std::vector<bool>& frozen = {});

CurvatureProfile curvature_profile(const DiscreteCurve& curve);

/// Squared turning per edge junction, |t_{i+1} - t_i|^2 / h^2 (cyclic).
/// This is the curvature weight of the discrete curve functional.
std::vector<double> junction_curvature_squared(const DiscreteCurve& curve);

HarmonicField to_harmonic(const DiscreteCurve& curve, std::span<const double> phi);

CurveRecovery from_harmonic(const HarmonicField& field,
                            double rel_threshold = kDefaultZeroThreshold);

ZeroSetReport zero_set(const HarmonicField& field,
                       double rel_threshold = kDefaultZeroThreshold);

/// Weak loop condition |int sgn psi| <= sigma(Z) up to kLoopTolerance.
bool admissible(const HarmonicField& field, double rel_threshold = kDefaultZeroThreshold);

/// Supporting-line scan n -> argmax x.n over `directions` uniformly spaced
/// normals, refined by bisection in direction until hull edges are resolved.
DoubleTangentScan double_tangent(const DiscreteCurve& curve, int directions = 360);

/// Reflects the edges between vertices first_vertex and second_vertex
/// (first < second) across the mirror, which must pass through both vertices.
DiscreteCurve reflect_segment(const DiscreteCurve& curve, std::size_t first_vertex,
                              std::size_t second_vertex, const Mirror& mirror);

// Named curve corpus -------------------------------------------------------

struct CurveParams {
  double a = 2.0;          // ellipse semi-axes
  double b = 1.0;
  double ell = 5.0;        // dshape arc length (at total length 2 pi)
  double amplitude = 0.5;  // peanut r = 1 + amplitude cos 2t
  std::uint64_t seed = 1;
};

struct NamedCurve {
  DiscreteCurve curve;
  std::optional<std::vector<double>> phi;   // companion eigenfunction-like profile
};

/// circle, ellipse, digon, dshape, peanut, point_symmetric_random,
/// random_closed. All are rescaled to total length 2 pi.
NamedCurve make_named_curve(std::string_view name, const CurveParams& params, std::size_t n);

/// Arclength-resampled ellipse with its natural perimeter as length.
DiscreteCurve ellipse_curve(double a, double b, std::size_t n);

/// Arclength resampling of a smooth closed parametric curve t in [0, 2 pi)
/// given its velocity. Returns a planar curve with length = perimeter.
DiscreteCurve resample_parametric(double (*vx)(double, const CurveParams&),
                                  double (*vy)(double, const CurveParams&),
                                  const CurveParams& params, std::size_t n);

}  // namespace ovalab
