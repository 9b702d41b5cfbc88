#pragma once

#include <array>
#include <cstddef>

namespace ovalab {

// 5-point Gauss-Legendre on [-1, 1]
inline constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                      0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                        0.5688888888888889, 0.4786286704993665,
                                                        0.2369268850561891};

template <class F>
double gauss5(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) s += kGaussWeights[k] * f(mid + half * kGaussNodes[k]);
  return s * half;
}

template <class F>
double gauss5_composite(F&& f, double a, double b, int cells) {
  const double dx = (b - a) / cells;
  double s = 0.0;
  for (int i = 0; i < cells; ++i) s += gauss5(f, a + i * dx, a + (i + 1) * dx);
  return s;
}

}  // namespace ovalab
