#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ovalab/common.hpp"
#include "ovalab/geometry.hpp"

namespace ovalab::testing {

/// A non-convex closed curve, symmetric under x -> -x, whose bottom support
/// line contains a few whole edges at each contact, plus the data for
/// reflecting the arc over the top across that line.
struct ReflectionCase {
  DiscreteCurve curve;
  std::size_t first = 0;
  std::size_t second = 0;
  Mirror mirror;
};

inline ReflectionCase flat_contact_curve(std::uint64_t seed, std::size_t n, std::size_t window = 3) {
  SplitMix64 rng(seed);
  const double h = kTwoPi / static_cast<double>(n);
  const double a = rng.uniform(0.65, 0.8);
  double b[7] = {};
  for (int k = 3; k <= 6; ++k) b[k] = rng.uniform(-0.03, 0.03);
  // theta(2 pi - s) = 2 pi - theta(s): mirror symmetric about a vertical axis
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = (static_cast<double>(i) + 0.5) * h;
    theta[i] = s - a * std::sin(2.0 * s);
    for (int k = 3; k <= 6; ++k) theta[i] += b[k] * std::sin(k * s);
  }
  // first edge past the bottom dent where the tangent turns back to horizontal
  std::size_t e = 1;
  while (e < n / 2 && theta[e] < 0.0) ++e;
  std::vector<bool> frozen(n, false);
  for (std::size_t i = e; i < e + window; ++i) {
    theta[i] = 0.0;
    theta[n - 1 - i] = kTwoPi;
    frozen[i] = frozen[n - 1 - i] = true;
  }
  auto proj = project_to_closure(theta, frozen);
  ReflectionCase out{DiscreteCurve::planar(std::move(proj.theta), kTwoPi), e, n - e, {}};
  auto v = out.curve.vertices();
  out.mirror.point = {v[2 * e], v[2 * e + 1]};
  out.mirror.normal = {0.0, 1.0};
  return out;
}

}  // namespace ovalab::testing
