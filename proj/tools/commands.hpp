#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace ovalab::cli {

struct RunConfig {
  std::string command;
  std::string curve = "circle";     // named curve or path to curve JSON
  std::string init;                 // harmonic JSON path (minimize)
  std::string out;                  // CSV artifact path
  std::size_t n = 512;
  std::optional<double> tol;        // per-command default
  std::size_t max_iter = 2000;
  std::uint64_t seed = 1;
  std::vector<double> sigma;
  std::optional<double> eps;        // shooting offset / minimize perturbation
  double span = 3.0;
  double a = 1.0;
  double A = 0.5;
  double c = 0.4;
  double lambda = 1.0;
  double ell = 5.0;
  bool study = false;
  // sweep
  std::string sub;
  std::vector<std::string> params;  // "name=v1,v2,..."
};

/// Canonical text of every field except the output path.
std::string canonical(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

/// Runs one command. JSON summaries go to `out`, diagnostics to `err`.
/// Returns 0, 2 (validation) or 3 (numerical failure).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace ovalab::cli
