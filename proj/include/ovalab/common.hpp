#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ovalab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Bad input: wrong sizes, out-of-range parameters, malformed files.
/// The CLI maps this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver (non-convergence, singular
/// systems, infeasible constructions). The CLI maps this to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SplitMix64. Update constants:
///   state += 0x9E3779B97F4A7C15
///   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   out = z ^ (z >> 31)
/// Doubles in [0,1) use the top 53 bits: (out >> 11) * 2^-53.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();                         // [0, 1)
  double uniform(double lo, double hi);     // [lo, hi)
  double normal();                          // Box-Muller, one draw per call

 private:
  std::uint64_t state_;
};

/// FNV-1a 64-bit, used for config hashes in CSV metadata.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace ovalab
