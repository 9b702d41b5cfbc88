#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_common(CLI::App* app, ovalab::cli::RunConfig& cfg) {
  app->add_option("--curve", cfg.curve, "named curve or path to curve JSON");
  app->add_option("--n", cfg.n, "grid size");
  app->add_option("--tol", cfg.tol, "tolerance (command specific default)");
  app->add_option("--max-iter", cfg.max_iter, "iteration cap");
  app->add_option("--seed", cfg.seed, "random seed");
  app->add_option("--out", cfg.out, "CSV artifact path");
  app->add_option("--sigma", cfg.sigma, "surgery scale, repeatable");
  app->add_option("--eps", cfg.eps, "shooting offset or initial perturbation");
  app->add_option("--span", cfg.span, "integration end point");
  app->add_option("--a", cfg.a, "R'(0)");
  app->add_option("--A", cfg.A, "theta' amplitude");
  app->add_option("--c", cfg.c, "singular exponent");
  app->add_option("--lambda", cfg.lambda, "eigenvalue");
  app->add_option("--ell", cfg.ell, "D-shape arc length");
}

}  // namespace

int main(int argc, char** argv) {
  ovalab::cli::RunConfig cfg;
  CLI::App app{"ovalab: principal eigenvalue experiments on closed curves"};
  app.set_version_flag("--version", std::string(OVALAB_VERSION));
  app.require_subcommand(1, 1);

  auto* eval = app.add_subcommand("eval", "principal eigenpair and curvature profile of a curve");
  add_common(eval, cfg);
  eval->add_flag("--study", cfg.study, "grid convergence study over N, 2N, 4N, 8N");

  auto* minimize = app.add_subcommand("minimize", "constrained descent on the harmonic field");
  add_common(minimize, cfg);
  minimize->add_option("--init", cfg.init, "harmonic JSON initial field");

  add_common(app.add_subcommand("shoot", "integrate the Euler-Lagrange flow from a singular end"), cfg);
  add_common(app.add_subcommand("surgery", "spline surgery on a D-shape"), cfg);
  add_common(app.add_subcommand("double-tangent", "double tangent or monotonicity certificate"), cfg);

  auto* sweep = app.add_subcommand("sweep", "grid over another command's scalar parameters");
  add_common(sweep, cfg);
  sweep->add_option("--sub", cfg.sub, "command to sweep")->required();
  sweep->add_option("--param", cfg.params, "name=v1,v2,... (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return ovalab::cli::run(cfg, std::cout, std::cerr);
}
