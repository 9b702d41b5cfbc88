#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ovalab/common.hpp"
#include "ovalab/descent.hpp"
#include "ovalab/elflow.hpp"
#include "ovalab/geometry.hpp"
#include "ovalab/io.hpp"
#include "ovalab/spectrum.hpp"
#include "ovalab/surgery.hpp"

namespace ovalab::cli {

using json = nlohmann::ordered_json;

namespace {

std::unique_ptr<CsvWriter> open_csv(const RunConfig& cfg, bool artifacts, std::vector<std::string> header) {
  if (!artifacts || cfg.out.empty()) return nullptr;
  return std::make_unique<CsvWriter>(cfg.out, std::move(header), config_hash(cfg));
}

double tol_or(const RunConfig& cfg, double fallback) {
  double t = cfg.tol.value_or(fallback);
  if (!(t > 0.0 && t < 0.1)) throw ValidationError("tolerance must lie in (0, 0.1)");
  return t;
}

bool from_file(const RunConfig& cfg) {
  return std::filesystem::is_regular_file(cfg.curve) || cfg.curve.ends_with(".json");
}

NamedCurve load_curve(const RunConfig& cfg) {
  if (from_file(cfg)) return {parse_curve_json(read_text_file(cfg.curve)), std::nullopt};
  CurveParams p;
  p.seed = cfg.seed;
  p.ell = cfg.ell;
  return make_named_curve(cfg.curve, p, cfg.n);
}

std::vector<double> grid(std::size_t n, double length) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = length * static_cast<double>(i) / static_cast<double>(n);
  return s;
}

std::string mu_name(std::size_t k) {
  static const char* names[] = {"mu_x", "mu_y", "mu_z", "mu_w"};
  return k < 4 ? names[k] : "mu_" + std::to_string(k);
}

// eval ------------------------------------------------------------------

json eval_cmd(const RunConfig& cfg, bool artifacts) {
  json s;
  s["command"] = "eval";
  s["curve"] = cfg.curve;
  // The optimal digon is the doubly covered segment; its principal
  // eigenvalue is the Dirichlet one of the segment of length pi.
  const bool segment = cfg.curve == "digon";
  s["mode"] = segment ? "dirichlet_segment" : "periodic";

  auto solve_named = [&](std::size_t n) {
    if (segment) return principal_eigen(std::vector<double>(n, 0.0), kPi, Boundary::dirichlet);
    RunConfig c = cfg;
    c.n = n;
    return curve_eigen(load_curve(c).curve);
  };

  if (cfg.study) {
    if (from_file(cfg)) throw ValidationError("a convergence study needs a named curve");
    std::vector<std::size_t> grids = {cfg.n, 2 * cfg.n, 4 * cfg.n, 8 * cfg.n};
    auto csv = open_csv(cfg, artifacts, {"N", "lambda", "residual", "observed_order"});
    ConvergenceStudy st = convergence_study(solve_named, grids);
    for (const auto& r : st.rows)
      if (csv) csv->row({static_cast<double>(r.n), r.lambda, r.residual, r.observed_order});
    s["lambda"] = st.rows.back().lambda;
    s["extrapolated"] = st.extrapolated;
    s["grids"] = grids;
    const auto& last = st.rows.back();
    if (std::isfinite(last.observed_order)) s["observed_order"] = last.observed_order;
    return s;
  }

  EigenResult e;
  std::vector<double> kappa, svals;
  if (segment) {
    e = solve_named(cfg.n);
    kappa.assign(cfg.n, 0.0);
    for (std::size_t i = 0; i < cfg.n; ++i)
      svals.push_back(kPi * static_cast<double>(i + 1) / static_cast<double>(cfg.n + 1));
  } else {
    NamedCurve nc = load_curve(cfg);
    if (!nc.curve.closed()) {
      std::ostringstream msg;
      msg << "curve is not closed: defect " << nc.curve.closure_defect() << " exceeds "
          << nc.curve.closure_tolerance();
      throw ValidationError(msg.str());
    }
    e = curve_eigen(nc.curve);
    kappa = curvature_profile(nc.curve).kappa;
    svals = grid(nc.curve.size(), nc.curve.length());
  }
  if (auto csv = open_csv(cfg, artifacts, {"s", "kappa", "phi"}))
    for (std::size_t i = 0; i < e.phi.size(); ++i) csv->row({svals[i], kappa[i], e.phi[i]});

  s["lambda"] = e.lambda;
  s["residual"] = e.residual;
  s["n"] = e.n;
  s["length"] = e.length;
  s["iterations"] = e.iterations;
  s["converged"] = e.converged;
  s["curvature_capped"] = e.capped;
  if (!e.converged) throw NumericalError("eigensolver did not converge");
  return s;
}

// minimize ----------------------------------------------------------------

HarmonicField initial_field(const RunConfig& cfg) {
  if (!cfg.init.empty()) return parse_harmonic_json(read_text_file(cfg.init));
  NamedCurve nc = load_curve(cfg);
  DiscreteCurve curve = nc.curve.with_length(kTwoPi);
  EigenResult e = curve_eigen(curve);
  HarmonicField f = to_harmonic(curve, e.phi);
  const double eps = cfg.eps.value_or(0.0);
  if (eps != 0.0) {
    // low Fourier modes with seeded normal amplitudes, each component
    SplitMix64 rng(cfg.seed);
    const auto d = static_cast<std::size_t>(f.dim());
    const auto s = grid(f.size(), kTwoPi);
    for (std::size_t j = 0; j < d; ++j) {
      for (int k = 2; k <= 4; ++k) {
        double ca = eps * rng.normal() / k, sa = eps * rng.normal() / k;
        for (std::size_t i = 0; i < f.size(); ++i) f[i][j] += ca * std::cos(k * s[i]) + sa * std::sin(k * s[i]);
      }
    }
  }
  return f;
}

json minimize_cmd(const RunConfig& cfg, bool artifacts) {
  HarmonicField init = initial_field(cfg);
  DescentOptions opts;
  opts.tol = tol_or(cfg, 1e-6);
  opts.max_iter = cfg.max_iter;

  std::vector<std::string> header = {"iter", "rq", "lambda_est"};
  for (int k = 0; k < init.dim(); ++k) header.push_back(mu_name(static_cast<std::size_t>(k)));
  for (const char* h : {"loop_residual", "el_residual", "step"}) header.push_back(h);
  auto csv = open_csv(cfg, artifacts, header);

  DescentResult r = minimize(init, opts);
  if (csv) {
    for (const auto& st : r.trace) {
      std::vector<double> row = {static_cast<double>(st.iter), st.rq, st.lambda_est};
      row.insert(row.end(), st.mu_est.begin(), st.mu_est.end());
      row.insert(row.end(), {st.loop_residual, st.el_residual, st.step});
      csv->row(row);
    }
  }
  json s;
  s["command"] = "minimize";
  s["verdict"] = to_string(r.verdict);
  s["iterations"] = r.trace.empty() ? 0 : r.trace.back().iter;
  if (!r.trace.empty()) {
    const auto& last = r.trace.back();
    s["rq"] = last.rq;
    s["lambda_est"] = last.lambda_est;
    s["el_residual"] = last.el_residual;
    s["loop_residual"] = last.loop_residual;
  }
  s["n"] = init.size();
  s["dim"] = init.dim();
  if (r.verdict != DescentVerdict::converged)
    throw NumericalError("descent stopped without converging: " + to_string(r.verdict));
  return s;
}

// shoot -------------------------------------------------------------------

json shoot_cmd(const RunConfig& cfg, bool artifacts) {
  SingularData d = make_singular_data(cfg.a, cfg.A, cfg.c, cfg.lambda);
  const double eps = cfg.eps.value_or(1e-3);
  const double tol = tol_or(cfg, 1e-10);
  if (cfg.n < 1) throw ValidationError("need at least one sample interval");
  std::vector<double> samples(cfg.n + 1);
  for (std::size_t k = 0; k <= cfg.n; ++k)
    samples[k] = eps + (cfg.span - eps) * static_cast<double>(k) / static_cast<double>(cfg.n);
  samples.back() = cfg.span;

  auto csv = open_csv(cfg, artifacts, {"s", "R", "Rp", "theta", "thetap", "E"});
  ShootResult r = shoot_from_singularity(d, eps, cfg.span, tol, samples);
  const auto& t = r.trajectory;
  if (csv) {
    for (std::size_t i = 0; i < t.s.size(); ++i) {
      const auto& y = t.y[i];
      PolarState p{y[0], y[1], y[2], y[3]};
      csv->row({t.s[i], y[0], y[1], y[2], y[3], energy(p, d.lambda, d.mu)});
    }
  }
  json s;
  s["command"] = "shoot";
  s["mu"] = d.mu;
  s["target_energy"] = r.target_energy;
  s["max_energy_error"] = r.max_energy_error;
  s["floor_hit"] = t.floor_hit;
  s["stop"] = t.stop;
  s["steps"] = t.steps;
  s["rejected"] = t.rejected;
  s["samples"] = t.s.size();
  return s;
}

// surgery -----------------------------------------------------------------

json surgery_cmd(const RunConfig& cfg, bool artifacts) {
  SingularData d = make_singular_data(cfg.a, cfg.A, cfg.c, cfg.lambda);
  std::vector<double> sigmas = cfg.sigma;
  if (sigmas.empty()) sigmas = {0.04, 0.02, 0.01, 0.005};
  auto csv = open_csv(cfg, artifacts,
                      {"sigma", "sigma_prime", "rq_before", "rq_after", "length_factor", "slope_contribution"});
  DShapeConfig config = build_dshape(d, cfg.ell, cfg.n);
  std::vector<SurgeryReport> reports;
  for (double sigma : sigmas) {
    SurgeryReport r = spline_surgery(config, sigma).report;
    if (csv)
      csv->row({r.sigma, r.sigma_prime, r.rq_before, r.rq_after, r.length_factor,
                (r.rq_before - r.rq_after) / r.sigma});
    reports.push_back(r);
  }
  json s;
  s["command"] = "surgery";
  s["n"] = cfg.n;
  s["s1"] = config.shape.s1();
  s["bump_center"] = config.shape.bump_center();
  s["rq_before"] = reports.front().rq_before;
  s["predicted_slope"] = reports.front().predicted_slope;
  if (reports.size() >= 3) {
    SlopeFit f = fit_decrease_slope(reports);
    s["slope_b"] = f.slope_b;
    s["r_squared"] = f.r_squared;
    s["ratio"] = f.ratio;
  }
  return s;
}

// double-tangent ----------------------------------------------------------

json double_tangent_cmd(const RunConfig& cfg, bool) {
  NamedCurve nc = load_curve(cfg);
  DoubleTangentScan scan = double_tangent(nc.curve);
  json s;
  s["command"] = "double-tangent";
  s["monotone"] = scan.monotone;
  s["total_turning"] = scan.total_turning;
  s["found"] = scan.tangent.has_value();
  if (scan.tangent) {
    const auto& t = *scan.tangent;
    s["first_vertex"] = t.first_vertex;
    s["second_vertex"] = t.second_vertex;
    s["s1"] = t.s1;
    s["s2"] = t.s2;
    s["point"] = t.line.point;
    s["normal"] = t.line.normal;
  }
  return s;
}

json dispatch(const RunConfig& cfg, bool artifacts) {
  // only the iterative commands take --tol; elsewhere it would be ignored
  if (cfg.tol && cfg.command != "minimize" && cfg.command != "shoot")
    throw ValidationError("--tol does not apply to " + cfg.command);
  if (cfg.command == "eval") return eval_cmd(cfg, artifacts);
  if (cfg.command == "minimize") return minimize_cmd(cfg, artifacts);
  if (cfg.command == "shoot") return shoot_cmd(cfg, artifacts);
  if (cfg.command == "surgery") return surgery_cmd(cfg, artifacts);
  if (cfg.command == "double-tangent") return double_tangent_cmd(cfg, artifacts);
  throw ValidationError("unknown command: " + cfg.command);
}

// sweep -------------------------------------------------------------------

double to_number(const std::string& name, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ValidationError("sweep value for " + name + " is not a number: " + v);
  return x;
}

std::size_t to_count(const std::string& name, const std::string& v) {
  double x = to_number(name, v);
  if (!(x >= 0.0) || x != std::floor(x)) throw ValidationError("sweep value for " + name + " must be a count: " + v);
  return static_cast<std::size_t>(x);
}

void set_param(RunConfig& c, const std::string& name, const std::string& v) {
  if (name == "curve") c.curve = v;
  else if (name == "n") c.n = to_count(name, v);
  else if (name == "tol") c.tol = to_number(name, v);
  else if (name == "max-iter") c.max_iter = to_count(name, v);
  else if (name == "seed") c.seed = to_count(name, v);
  else if (name == "sigma") c.sigma = {to_number(name, v)};
  else if (name == "eps") c.eps = to_number(name, v);
  else if (name == "span") c.span = to_number(name, v);
  else if (name == "a") c.a = to_number(name, v);
  else if (name == "A") c.A = to_number(name, v);
  else if (name == "c") c.c = to_number(name, v);
  else if (name == "lambda") c.lambda = to_number(name, v);
  else if (name == "ell") c.ell = to_number(name, v);
  else throw ValidationError("unknown sweep parameter: " + name);
}

struct Axis {
  std::string name;
  std::vector<std::string> values;
};

std::vector<Axis> parse_axes(const std::vector<std::string>& params) {
  std::vector<Axis> axes;
  for (const auto& p : params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == p.size())
      throw ValidationError("sweep parameter must look like name=v1,v2: " + p);
    Axis ax{p.substr(0, eq), {}};
    std::stringstream ss(p.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) ax.values.push_back(item);
    if (ax.values.empty()) throw ValidationError("sweep parameter has no values: " + p);
    axes.push_back(std::move(ax));
  }
  if (axes.empty()) throw ValidationError("sweep needs at least one --param");
  return axes;
}

std::size_t thread_cap() {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OVALAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ValidationError("OVALAB_THREADS must be a positive integer");
    cap = static_cast<std::size_t>(v);
  }
  return cap;
}

struct Entry {
  std::vector<std::string> values;
  std::string status = "ok";
  json summary;
};

std::string cell(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return "";
}

int sweep_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.sub.empty() || cfg.sub == "sweep") throw ValidationError("sweep needs --sub naming another command");
  auto axes = parse_axes(cfg.params);

  std::vector<Entry> entries(1);
  for (const auto& ax : axes) {
    std::vector<Entry> next;
    for (const auto& e : entries)
      for (const auto& v : ax.values) {
        Entry x = e;
        x.values.push_back(v);
        next.push_back(std::move(x));
      }
    entries = std::move(next);
  }
  // validate every entry before any work starts
  std::vector<RunConfig> configs;
  for (const auto& e : entries) {
    RunConfig c = cfg;
    c.command = cfg.sub;
    c.out.clear();
    for (std::size_t k = 0; k < axes.size(); ++k) set_param(c, axes[k].name, e.values[k]);
    configs.push_back(std::move(c));
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        entries[i].summary = dispatch(configs[i], false);
      } catch (const std::invalid_argument& e) {
        entries[i].status = "validation_error";
      } catch (const std::exception& e) {
        entries[i].status = "numerical_error";
      }
    }
  };
  const std::size_t workers = std::min(thread_cap(), entries.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // union of scalar summary keys, first seen order
  std::vector<std::string> keys;
  for (const auto& e : entries)
    for (const auto& [k, v] : e.summary.items())
      if (v.is_primitive() && !v.is_null() && k != "command" &&
          std::none_of(axes.begin(), axes.end(), [&](const Axis& ax) { return ax.name == k; }) &&
          std::find(keys.begin(), keys.end(), k) == keys.end())
        keys.push_back(k);

  std::vector<std::string> header;
  for (const auto& ax : axes) header.push_back(ax.name);
  header.push_back("status");
  header.insert(header.end(), keys.begin(), keys.end());

  std::unique_ptr<CsvWriter> csv = cfg.out.empty()
                                       ? std::make_unique<CsvWriter>(out, header, config_hash(cfg))
                                       : std::make_unique<CsvWriter>(cfg.out, header, config_hash(cfg));
  int failures = 0;
  for (const auto& e : entries) {
    std::vector<std::string> row = e.values;
    row.push_back(e.status);
    for (const auto& k : keys) row.push_back(e.summary.contains(k) ? cell(e.summary[k]) : "nan");
    csv->row_text(row);
    if (e.status != "ok") ++failures;
  }
  csv->close();
  if (failures) err << "sweep: " << failures << " of " << entries.size() << " entries failed\n";
  return 0;
}

}  // namespace

std::string canonical(const RunConfig& cfg) {
  std::ostringstream s;
  s << "command=" << cfg.command << ";curve=" << cfg.curve << ";init=" << cfg.init << ";n=" << cfg.n
    << ";tol=" << (cfg.tol ? format_number(*cfg.tol) : "default") << ";max_iter=" << cfg.max_iter
    << ";seed=" << cfg.seed << ";sigma=";
  for (std::size_t i = 0; i < cfg.sigma.size(); ++i) s << (i ? "," : "") << format_number(cfg.sigma[i]);
  s << ";eps=" << (cfg.eps ? format_number(*cfg.eps) : "default") << ";span=" << format_number(cfg.span)
    << ";a=" << format_number(cfg.a) << ";A=" << format_number(cfg.A) << ";c=" << format_number(cfg.c)
    << ";lambda=" << format_number(cfg.lambda) << ";ell=" << format_number(cfg.ell) << ";study=" << cfg.study
    << ";sub=" << cfg.sub << ";params=";
  for (std::size_t i = 0; i < cfg.params.size(); ++i) s << (i ? "|" : "") << cfg.params[i];
  return s.str();
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(canonical(cfg)); }

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "sweep") return sweep_cmd(cfg, out, err);
    json s = dispatch(cfg, true);
    out << s.dump() << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace ovalab::cli
