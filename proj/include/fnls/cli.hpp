#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fnls/analysis.hpp"
#include "fnls/config.hpp"
#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/orbit.hpp"
#include "fnls/report.hpp"
#include "fnls/riesz.hpp"
#include "fnls/snapshot.hpp"

namespace fnls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOperational = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr const char* kErrorPrefix = "FNLS-ERR: ";

namespace detail {

inline std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ParseError("cannot parse '" + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(what + " is empty");
  return out;
}

inline std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// Returns 0 or 2 and writes the summary (stdout, and the file if requested).
inline int finish(Json summary, const Assertions& assertions, const std::string& summary_path, std::ostream& out) {
  summary["assertions"] = assertions.to_json();
  summary["pass"] = assertions.all_ok();
  if (!summary_path.empty()) write_json(summary_path, summary);
  out << summary.dump(2) << '\n';
  return assertions.all_ok() ? kExitOk : kExitAssertion;
}

inline Json config_json(const RunConfig& c) {
  return Json{{"dimension", c.physics.dimension},
              {"s", c.physics.s},
              {"beta", c.physics.beta},
              {"lambda", c.physics.lambda},
              {"c2", c.nonlinearity.c2},
              {"cmu", c.nonlinearity.cmu},
              {"mu", c.nonlinearity.mu},
              {"n", c.n},
              {"L", c.L},
              {"kernel", to_string(c.kernel)}};
}

struct Context {
  RunConfig config;
  Grid grid;
  RieszKernelPlan plan;
};

inline Context load_context(const std::string& path) {
  auto cfg = load_config(path);
  auto g = cfg.grid();
  RieszKernelPlan plan(g, cfg.physics.beta, cfg.kernel);
  return Context{std::move(cfg), std::move(g), std::move(plan)};
}

inline ComplexField load_on_grid(const std::string& path, const Grid& g) {
  auto u = load_snapshot(path);
  if (!(u.grid() == g)) throw GridMismatch("snapshot '" + path + "' does not match the configured grid");
  return u;
}

inline double time_step(const Context& ctx, double requested) {
  if (requested > 0.0) return requested;
  if (ctx.config.evolution.dt > 0.0) return ctx.config.evolution.dt;
  return default_time_step(ctx.grid, ctx.config.physics.s);
}

/// Gaussian with standard deviation L_j/32 per axis at unit mass; resolved under dilations in [0.5, 2]
/// on grids with L_j/n_j small against L_j/64.
inline ComplexField exponent_probe(const Grid& g) {
  auto u = sample<Complex>(g, [&](std::span<const double> x) {
    double e = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double sigma = g.length(j) / 32.0;
      e += x[j] * x[j] / (2.0 * sigma * sigma);
    }
    return std::exp(-e);
  });
  u *= 1.0 / std::sqrt(mass(u));
  return u;
}

}  // namespace detail

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

inline int cmd_validate(const std::string& config, const std::string& summary_path, std::ostream& out) {
  const auto cfg = load_config(config);
  Json j{{"config", detail::config_json(cfg)}, {"admissibility", to_json(cfg.admissibility)}};
  if (!summary_path.empty()) write_json(summary_path, j);
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct GroundStateArgs {
  std::string config, init, out, history, summary;
};

inline int cmd_ground_state(const GroundStateArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  std::optional<ComplexField> init;
  if (!a.init.empty()) init = detail::load_on_grid(a.init, ctx.grid);
  auto opts = ctx.config.solver_options();
  const auto gs = solve_ground_state(ctx.config.physics, ctx.config.nonlinearity, ctx.plan, init, opts);
  if (!a.out.empty()) save_snapshot(a.out, gs.state);
  if (!a.history.empty()) {
    CsvWriter csv(a.history, history_columns());
    for (const auto& h : gs.history) csv.row(history_row(h));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < gs.history.size(); ++i)
    if (gs.history[i].iter > opts.warmup &&
        gs.history[i].energy.total > gs.history[i - 1].energy.total + 1e-12 * std::abs(gs.history[i - 1].energy.total))
      monotone = false;
  Assertions as;
  as.check("converged", gs.converged);
  as.check("el_residual_below_10_tol", gs.el_residual <= 10.0 * opts.tol);
  as.check("energy_negative_beyond_uncertainty", gs.energy.total < -10.0 * gs.energy_uncertainty);
  as.check("energy_history_monotone", monotone);
  return detail::finish(Json{{"config", detail::config_json(ctx.config)}, {"ground_state", to_json(gs)}}, as,
                        a.summary, out);
}

struct EvolveArgs {
  std::string config, init, ref, out, dump_prefix, summary;
  double T = 0.0, dt = 0.0;
  std::size_t dump_every = 0, record_stride = 0;
};

inline int cmd_evolve(const EvolveArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  const auto phi0 = detail::load_on_grid(a.init, ctx.grid);
  const double T = a.T > 0.0 ? a.T : ctx.config.evolution.T;
  const double dt = detail::time_step(ctx, a.dt);
  EvolveOptions eo;
  eo.record_stride = a.record_stride > 0 ? a.record_stride : ctx.config.evolution.record_stride;
  if (!a.ref.empty()) eo.reference = detail::load_on_grid(a.ref, ctx.grid);
  CsvWriter csv(a.out, trajectory_columns());
  eo.on_record = [&](const TrajectoryRecord& r) { csv.row(trajectory_row(r)); };
  if (a.dump_every > 0) {
    if (a.dump_prefix.empty()) throw DomainError("--dump-every needs --dump-prefix");
    eo.dump_every = a.dump_every;
    eo.on_dump = [&](std::size_t step, double, const ComplexField& phi) {
      char name[32];
      std::snprintf(name, sizeof name, "_%08zu.snap", step);
      save_snapshot(a.dump_prefix + name, phi);
    };
  }
  const auto traj = evolve(phi0, T, dt, ctx.config.physics, ctx.config.nonlinearity, ctx.plan, eo);
  if (traj.error) throw SolverError("evolution aborted after t=" + std::to_string(traj.records.back().t) + ": " + *traj.error);

  const double m0 = traj.records.front().mass, j0 = traj.records.front().energy_J;
  double mass_drift = 0.0, energy_drift = 0.0, sup_distance = 0.0;
  for (const auto& r : traj.records) {
    mass_drift = std::max(mass_drift, std::abs(r.mass - m0) / m0);
    energy_drift = std::max(energy_drift, std::abs(r.energy_J - j0));
    sup_distance = std::max(sup_distance, r.orbit_distance.value_or(0.0));
  }
  Json j{{"config", detail::config_json(ctx.config)},
         {"T", T},
         {"dt", traj.dt},
         {"steps", traj.steps},
         {"records", traj.records.size()},
         {"max_relative_mass_drift", mass_drift},
         {"max_energy_drift", energy_drift}};
  if (eo.reference) j["sup_orbit_distance"] = sup_distance;
  Assertions as;
  as.check("mass_conserved_1e-10", mass_drift <= 1e-10);
  return detail::finish(std::move(j), as, a.summary, out);
}

struct StabilityArgs {
  std::string config, gs, deltas = "0.001,0.003,0.01", kinds = "random-smooth,mode-bump", out, summary;
  double T = 0.0, dt = 0.0;
};

inline int cmd_stability(const StabilityArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  const auto& cfg = ctx.config;
  const auto u = detail::load_on_grid(a.gs, ctx.grid);
  const auto gs = describe_state(u, cfg.physics, cfg.nonlinearity, ctx.plan, cfg.solver.tol);
  const auto deltas = detail::parse_reals(a.deltas, "--deltas");
  std::vector<PerturbationKind> kinds;
  for (const auto& k : detail::split(a.kinds)) kinds.push_back(parse_perturbation_kind(k));
  StabilityOptions so;
  so.seed = cfg.seed;
  const double T = a.T > 0.0 ? a.T : cfg.evolution.T;
  const double dt = detail::time_step(ctx, a.dt);
  const auto rep = stability_experiment(cfg.physics, cfg.nonlinearity, ctx.plan, gs, deltas, T, dt, kinds, so);
  if (!a.out.empty()) {
    CsvWriter csv(a.out, {"delta", "kind", "initial_distance", "sup_distance", "final_time", "error"});
    for (const auto& r : rep.rows)
      csv.row({r.delta, std::string(to_string(r.kind)), r.initial_distance, r.sup_distance, r.final_time,
               r.error ? CsvCell{*r.error} : CsvCell{}});
  }
  Json j{{"config", detail::config_json(cfg)}, {"T", T}, {"dt", dt}, {"hs_norm", rep.hs_norm}, {"constant", rep.constant}};
  j["slopes"] = Json::array();
  for (const auto& [k, f] : rep.slopes) j["slopes"].push_back(to_json(f));
  Assertions as;
  as.check("sup_distance_below_half_hs_norm", rep.bounded_ok);
  as.check("slope_in_range", rep.slope_ok);
  return detail::finish(std::move(j), as, a.summary, out);
}

struct OrbitArgs {
  std::string config, phi, w, summary;
  bool subgrid = false;
};

inline int cmd_orbit(const OrbitArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  const auto phi = detail::load_on_grid(a.phi, ctx.grid);
  const auto w = detail::load_on_grid(a.w, ctx.grid);
  OrbitOptions oo;
  oo.subgrid = a.subgrid;
  const auto r = orbit_distance(phi, w, ctx.config.physics.s, oo);
  std::vector<long long> shift;
  std::vector<double> sub;
  for (std::size_t j = 0; j < ctx.grid.rank(); ++j) {
    shift.push_back(r.best_shift[j]);
    sub.push_back(r.subgrid_offset[j]);
  }
  Json j{{"distance", r.distance}, {"best_shift", shift}, {"subgrid_offset", sub}, {"best_phase", r.best_phase},
         {"relative_distance", r.distance / hs_norm(w, ctx.config.physics.s)}};
  return detail::finish(std::move(j), Assertions{}, a.summary, out);
}

struct LevyArgs {
  std::string config, field, radii, out, summary;
};

inline int cmd_levy(const LevyArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  const auto u = detail::load_on_grid(a.field, ctx.grid);
  const auto prof = levy_concentration(u, detail::parse_reals(a.radii, "--radii"));
  if (!a.out.empty()) {
    CsvWriter csv(a.out, {"r", "Q"});
    for (std::size_t i = 0; i < prof.radii.size(); ++i) csv.row({prof.radii[i], prof.Q[i]});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < prof.Q.size(); ++i) monotone = monotone && prof.Q[i] >= prof.Q[i - 1];
  Json j{{"mass", prof.mass}, {"m_inf", prof.m_inf}, {"classification", to_string(prof.classification)}};
  Assertions as;
  as.check("Q_monotone", monotone);
  as.check("Q_bounded_by_mass", prof.m_inf <= prof.mass);
  return detail::finish(std::move(j), as, a.summary, out);
}

struct ExponentsArgs {
  std::string config, field, out, summary;
};

inline int cmd_exponents(const ExponentsArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  const auto& cfg = ctx.config;
  const auto u = a.field.empty() ? detail::exponent_probe(ctx.grid) : detail::load_on_grid(a.field, ctx.grid);
  const auto fits = scaling_exponents(cfg.physics, cfg.nonlinearity, ctx.plan, u);
  const auto ex = gn_hls_exponents(cfg.physics, cfg.nonlinearity);
  const auto sweep = hls_ratio_sweep(cfg.physics, cfg.nonlinearity, ctx.plan, u);
  if (!a.out.empty()) {
    CsvWriter csv(a.out, {"name", "predicted", "fitted", "rel_error", "abs_error", "r_squared", "flagged"});
    auto put = [&](const ExponentFit& f) {
      csv.row({f.name, f.predicted, f.fitted, f.rel_error, f.abs_error, f.r_squared, static_cast<long long>(f.flagged)});
    };
    for (const auto& f : fits) put(f);
    for (const auto& s : sweep) {
      put(s.amplitude_trend);
      put(s.dilation_trend);
    }
  }
  Assertions as;
  Json j{{"config", detail::config_json(cfg)}};
  j["scaling"] = Json::array();
  for (const auto& f : fits) {
    j["scaling"].push_back(to_json(f));
    const bool ok = f.name == "mass" ? f.abs_error <= 1e-3 : f.rel_error <= 0.01;
    as.check("scaling_" + f.name, ok && !f.flagged);
  }
  j["hls"] = Json::array();
  for (const auto& s : sweep) {
    j["hls"].push_back({{"i", s.pair.i},
                        {"j", s.pair.j},
                        {"gamma", s.pair.gamma},
                        {"gamma_hs", s.pair.gamma_hs},
                        {"valid", s.pair.valid},
                        {"eta", s.eta},
                        {"amplitude_trend", s.amplitude_trend.fitted},
                        {"dilation_trend", s.dilation_trend.fitted},
                        {"dilation_trend_interchanged", s.dilation_trend_interchanged}});
    if (s.pair.valid)
      as.check("hls_no_trend_D" + std::to_string(s.pair.i) + std::to_string(s.pair.j), s.trend_ok);
  }
  j["young"] = {{"e1", ex.e1}, {"e2", ex.e2}, {"e3", ex.e3}, {"flags", ex.flags}};
  as.check("young_exponents_above_1", ex.young_ok);
  return detail::finish(std::move(j), as, a.summary, out);
}

struct SubaddArgs {
  std::string config, lambdas = "0.5,0.75,1,1.25,1.5", pairs, eps, out, summary;
};

inline int cmd_subadd(const SubaddArgs& a, std::ostream& out) {
  auto ctx = detail::load_context(a.config);
  const auto& cfg = ctx.config;
  auto lambdas = detail::parse_reals(a.lambdas, "--lambdas");
  std::vector<std::pair<double, double>> pairs;
  if (a.pairs.empty()) {
    pairs.emplace_back(0.5 * cfg.physics.lambda, cfg.physics.lambda);
  } else {
    for (const auto& p : detail::split(a.pairs)) {
      const auto colon = p.find(':');
      if (colon == std::string::npos) throw ParseError("pairs are written pi:lambda, got '" + p + "'");
      pairs.emplace_back(detail::parse_reals(p.substr(0, colon), "--pairs").front(),
                         detail::parse_reals(p.substr(colon + 1), "--pairs").front());
    }
  }
  SubadditivityOptions so;
  so.continuity_base = cfg.physics.lambda;
  if (!a.eps.empty()) so.eps = detail::parse_reals(a.eps, "--eps");
  for (const auto& [pi, lambda] : pairs) {
    lambdas.push_back(pi);
    lambdas.push_back(lambda);
    lambdas.push_back(lambda - pi);
  }
  for (double e : so.eps) lambdas.push_back(so.continuity_base * (1.0 + e));
  lambdas.push_back(so.continuity_base);
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end(),
                            [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }),
                lambdas.end());

  const auto curve = mass_energy_curve(cfg.physics, cfg.nonlinearity, ctx.plan, lambdas, cfg.solver_options());
  if (curve.error) throw SolverError("mass-energy curve: " + *curve.error);
  if (!a.out.empty()) {
    CsvWriter csv(a.out, {"lambda", "energy", "kappa", "el_residual", "energy_uncertainty", "converged"});
    for (const auto& p : curve.points)
      csv.row({p.lambda, p.energy, p.kappa, p.el_residual, p.energy_uncertainty, static_cast<long long>(p.converged)});
  }
  const auto rep = subadditivity_check(curve, cfg.physics, cfg.nonlinearity, pairs, so);
  Json j{{"config", detail::config_json(cfg)}};
  j["pairs"] = Json::array();
  for (const auto& r : rep.rows)
    j["pairs"].push_back({{"pi", r.pi}, {"lambda", r.lambda}, {"gap", r.gap}, {"margin", r.margin}, {"ok", r.ok}});
  if (rep.curve_exponent) j["curve_exponent"] = to_json(*rep.curve_exponent);
  bool theta_ok = true;
  for (const auto& t : rep.theta_rows) theta_ok = theta_ok && t.ok;
  Assertions as;
  bool strict = true;
  for (const auto& r : rep.rows) strict = strict && r.ok;
  as.check("strict_subadditivity", strict);
  as.check("theta_scaling", theta_ok);
  as.check("all_negative", rep.all_negative);
  as.check("vanishing_as_lambda_to_0", rep.vanishing_at_zero);
  as.check("continuity_proxy", rep.continuity_ok);
  return detail::finish(std::move(j), as, a.summary, out);
}

struct SweepArgs {
  std::string configs, out;
  std::size_t jobs = 1;
};

/// Ground state for every `*.cfg` in a directory; one JSON per config plus `sweep.csv`.
inline int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.configs))
    if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no .cfg files in '" + a.configs + "'");
  fs::create_directories(a.out);

  struct Row {
    std::string name;
    std::optional<GroundStateResult> gs;
    std::string error;
  };
  std::vector<Row> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      rows[i].name = files[i].stem().string();
      try {
        auto ctx = detail::load_context(files[i].string());
        rows[i].gs = solve_ground_state(ctx.config.physics, ctx.config.nonlinearity, ctx.plan, {},
                                        ctx.config.solver_options());
        write_json((fs::path(a.out) / (rows[i].name + ".json")).string(), to_json(*rows[i].gs));
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(1, a.jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CsvWriter csv((fs::path(a.out) / "sweep.csv").string(),
                {"name", "energy", "kappa", "el_residual", "converged", "error"});
  bool all_converged = true, any_error = false;
  for (const auto& r : rows) {
    if (r.gs) {
      csv.row({r.name, r.gs->energy.total, r.gs->kappa, r.gs->el_residual, static_cast<long long>(r.gs->converged), {}});
      all_converged = all_converged && r.gs->converged;
    } else {
      csv.row({r.name, {}, {}, {}, {}, r.error});
      any_error = true;
    }
  }
  out << "sweep: " << rows.size() << " configs written to " << a.out << '\n';
  if (any_error) throw Error("sweep had failing configs (see sweep.csv)");
  return all_converged ? kExitOk : kExitAssertion;
}

/// Parses argv and runs one subcommand. Errors go to `err` prefixed with "FNLS-ERR:".
inline int run(int argc, const char* const* argv, Streams io = {}) {
  CLI::App app{"Fractional Schroedinger-Hartree laboratory"};
  app.require_subcommand(1);

  std::string cfg_validate, summary_validate;
  auto* validate = app.add_subcommand("validate", "admissibility report for a config");
  validate->add_option("--config", cfg_validate)->required();
  validate->add_option("--summary", summary_validate);

  GroundStateArgs gsa;
  auto* gs = app.add_subcommand("ground-state", "mass-constrained energy minimizer");
  gs->add_option("--config", gsa.config)->required();
  gs->add_option("--init", gsa.init);
  gs->add_option("--out", gsa.out);
  gs->add_option("--history", gsa.history);
  gs->add_option("--summary", gsa.summary);

  EvolveArgs eva;
  auto* ev = app.add_subcommand("evolve", "Strang-split time evolution");
  ev->add_option("--config", eva.config)->required();
  ev->add_option("--init", eva.init)->required();
  ev->add_option("--T", eva.T);
  ev->add_option("--dt", eva.dt);
  ev->add_option("--ref", eva.ref);
  ev->add_option("--out", eva.out)->required();
  ev->add_option("--record-stride", eva.record_stride);
  ev->add_option("--dump-every", eva.dump_every);
  ev->add_option("--dump-prefix", eva.dump_prefix);
  ev->add_option("--summary", eva.summary);

  StabilityArgs sta;
  auto* st = app.add_subcommand("stability", "orbital stability experiment");
  st->add_option("--config", sta.config)->required();
  st->add_option("--gs", sta.gs)->required();
  st->add_option("--deltas", sta.deltas);
  st->add_option("--kinds", sta.kinds);
  st->add_option("--T", sta.T);
  st->add_option("--dt", sta.dt);
  st->add_option("--out", sta.out);
  st->add_option("--summary", sta.summary);

  auto* an = app.add_subcommand("analyze", "orbit | levy | exponents | subadd");
  an->require_subcommand(1);
  OrbitArgs ora;
  auto* orb = an->add_subcommand("orbit", "H^s distance to a ground-state orbit");
  orb->add_option("--config", ora.config)->required();
  orb->add_option("--phi", ora.phi)->required();
  orb->add_option("--w", ora.w)->required();
  orb->add_flag("--subgrid", ora.subgrid);
  orb->add_option("--summary", ora.summary);
  LevyArgs lva;
  auto* lev = an->add_subcommand("levy", "concentration function");
  lev->add_option("--config", lva.config)->required();
  lev->add_option("--field", lva.field)->required();
  lev->add_option("--radii", lva.radii)->required();
  lev->add_option("--out", lva.out);
  lev->add_option("--summary", lva.summary);
  ExponentsArgs exa;
  auto* exs = an->add_subcommand("exponents", "dilation slopes and interaction exponents");
  exs->add_option("--config", exa.config)->required();
  exs->add_option("--field", exa.field);
  exs->add_option("--out", exa.out);
  exs->add_option("--summary", exa.summary);
  SubaddArgs saa;
  auto* sub = an->add_subcommand("subadd", "strict subadditivity of the mass-energy curve");
  sub->add_option("--config", saa.config)->required();
  sub->add_option("--lambdas", saa.lambdas);
  sub->add_option("--pairs", saa.pairs, "comma separated pi:lambda pairs");
  sub->add_option("--eps", saa.eps);
  sub->add_option("--out", saa.out);
  sub->add_option("--summary", saa.summary);

  SweepArgs swa;
  auto* sw = app.add_subcommand("sweep", "ground states for a directory of configs");
  sw->add_option("--configs", swa.configs)->required();
  sw->add_option("--jobs", swa.jobs);
  sw->add_option("--out", swa.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << kErrorPrefix << e.what() << '\n';
    return kExitOperational;
  }

  try {
    if (validate->parsed()) return cmd_validate(cfg_validate, summary_validate, io.out);
    if (gs->parsed()) return cmd_ground_state(gsa, io.out);
    if (ev->parsed()) return cmd_evolve(eva, io.out);
    if (st->parsed()) return cmd_stability(sta, io.out);
    if (orb->parsed()) return cmd_orbit(ora, io.out);
    if (lev->parsed()) return cmd_levy(lva, io.out);
    if (exs->parsed()) return cmd_exponents(exa, io.out);
    if (sub->parsed()) return cmd_subadd(saa, io.out);
    if (sw->parsed()) return cmd_sweep(swa, io.out);
  } catch (const std::exception& e) {
    io.err << kErrorPrefix << e.what() << '\n';
    return kExitOperational;
  }
  io.err << kErrorPrefix << "no subcommand\n";
  return kExitOperational;
}

}  // namespace fnls::cli
