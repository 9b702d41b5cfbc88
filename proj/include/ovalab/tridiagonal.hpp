#pragma once

#include <span>
#include <vector>

namespace ovalab {

/// Symmetric tridiagonal matrix, optionally with periodic corner coupling.
/// off[i] couples rows i and i+1; in the periodic case off has size()
/// entries and off.back() couples the last row with row 0.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
  bool periodic = false;

  std::size_t size() const { return diag.size(); }
};

/// y = A x
std::vector<double> multiply(const SymTridiagonal& a, std::span<const double> x);

/// Solves (A - shift I) x = rhs. Periodic systems use the Sherman-Morrison
/// rank-one correction on top of the Thomas algorithm. The result may
/// contain non-finite values when the shifted matrix is (numerically)
/// singular; callers decide how to treat that.
std::vector<double> solve_shifted(const SymTridiagonal& a, double shift,
                                  std::span<const double> rhs);

}  // namespace ovalab
