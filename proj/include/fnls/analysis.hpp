#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"
#include "fnls/functionals.hpp"
#include "fnls/grid.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/model.hpp"
#include "fnls/orbit.hpp"
#include "fnls/riesz.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

// ---------------------------------------------------------------------------------------------
// Fits

inline constexpr std::size_t kMinFitPoints = 5;
inline constexpr double kMinRSquared = 0.999;

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// 1 for a constant series (nothing left to explain).
  double r_squared = 1.0;
};

inline LinearFit fit_line(const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw DomainError("a line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw DomainError("a line fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ymax = 0.0;
  for (const auto& p : pts) ymax = std::max(ymax, std::abs(p.second));
  // Series flat to roundoff carry no variance to explain.
  const double flat = 1e-24 * std::max(1.0, ymax * ymax) * static_cast<double>(pts.size());
  if (syy > flat) {
    double ssr = 0.0;
    for (const auto& [x, y] : pts) {
      const double r = y - (fit.intercept + fit.slope * x);
      ssr += r * r;
    }
    fit.r_squared = 1.0 - ssr / syy;
  }
  return fit;
}

struct ExponentFit {
  std::string name;
  double predicted = 0.0;
  double fitted = 0.0;
  /// |fitted - predicted| / max(|predicted|, 1e-12).
  double rel_error = 0.0;
  double abs_error = 0.0;
  double r_squared = 1.0;
  /// (log scale, log value).
  std::vector<std::pair<double, double>> samples;
  /// Too few points or R^2 below kMinRSquared.
  bool flagged = false;
};

inline ExponentFit make_exponent_fit(std::string name, double predicted, std::vector<std::pair<double, double>> samples) {
  ExponentFit f;
  f.name = std::move(name);
  f.predicted = predicted;
  const auto line = fit_line(samples);
  f.fitted = line.slope;
  f.r_squared = line.r_squared;
  f.abs_error = std::abs(f.fitted - f.predicted);
  f.rel_error = f.abs_error / std::max(std::abs(f.predicted), 1e-12);
  f.flagged = samples.size() < kMinFitPoints || f.r_squared < kMinRSquared;
  f.samples = std::move(samples);
  return f;
}

inline std::vector<double> log_ladder(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) throw DomainError("invalid ladder");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

// ---------------------------------------------------------------------------------------------
// Levy concentration

enum class ConcentrationClass { Vanishing, Dichotomy, Compact };

inline const char* to_string(ConcentrationClass c) {
  switch (c) {
    case ConcentrationClass::Vanishing: return "vanishing-like";
    case ConcentrationClass::Dichotomy: return "dichotomy-like";
    case ConcentrationClass::Compact: return "compact-like";
  }
  return "?";
}

struct ConcentrationThresholds {
  double compact = 0.99;
  double vanishing = 0.05;
};

struct ConcentrationProfile {
  std::vector<double> radii;
  std::vector<double> Q;
  double mass = 0.0;
  /// Q(r_max): the classification mass.
  double m_inf = 0.0;
  ConcentrationClass classification = ConcentrationClass::Vanishing;
};

/// Q(r) = max over grid centres y of the mass inside B(y, r), with the ball sampled by the
/// centre-in-ball rule and periodic wrap-around.
///
/// Balls are grown shell by shell and each shell's (nonnegative) contribution is clipped at
/// zero, so Q is nondecreasing exactly as computed; Q is also capped at the total mass.
inline ConcentrationProfile levy_concentration(const ComplexField& u, const std::vector<double>& radii,
                                               const ConcentrationThresholds& thresholds = {}) {
  const Grid& g = u.grid();
  if (radii.empty()) throw DomainError("at least one radius is required");
  double half = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.rank(); ++j) half = std::min(half, 0.5 * g.length(j));
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly increasing");
    if (!(radii[i] < half)) throw DomainError("radius " + std::to_string(radii[i]) + " is not below half the box");
  }

  ConcentrationProfile prof;
  prof.radii = radii;
  std::vector<Complex> dens(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) {
    dens[f] = std::norm(u[f]) * g.cell_volume();
    prof.mass += dens[f].real();
  }
  fft::forward(g.dims(), dens);

  std::vector<double> dist2(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.unflatten(f);
    double r2 = 0.0;
    for (std::size_t j = 0; j < g.rank(); ++j) {
      const auto n = static_cast<std::ptrdiff_t>(g.dim(j));
      auto m = static_cast<std::ptrdiff_t>(idx[j]);
      if (m >= n / 2) m -= n;
      const double d = static_cast<double>(m) * g.spacing(j);
      r2 += d * d;
    }
    dist2[f] = r2;
  }

  std::vector<double> captured(g.size(), 0.0);
  double inner = -1.0;
  for (double r : radii) {
    std::vector<Complex> shell(g.size());
    for (std::size_t f = 0; f < g.size(); ++f) shell[f] = (dist2[f] <= r * r && dist2[f] > inner) ? 1.0 : 0.0;
    fft::forward(g.dims(), shell);
    for (std::size_t f = 0; f < g.size(); ++f) shell[f] *= dens[f];
    fft::inverse(g.dims(), shell);
    double best = 0.0;
    for (std::size_t f = 0; f < g.size(); ++f) {
      captured[f] += std::max(0.0, shell[f].real());
      best = std::max(best, captured[f]);
    }
    prof.Q.push_back(std::min(best, prof.mass));
    inner = r * r;
  }
  prof.m_inf = prof.Q.back();
  if (prof.m_inf >= thresholds.compact * prof.mass)
    prof.classification = ConcentrationClass::Compact;
  else if (prof.m_inf <= thresholds.vanishing * prof.mass)
    prof.classification = ConcentrationClass::Vanishing;
  else
    prof.classification = ConcentrationClass::Dichotomy;
  return prof;
}

// ---------------------------------------------------------------------------------------------
// Orbital stability

enum class PerturbationKind { RandomSmooth, ModeBump, PhaseRamp };

inline const char* to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::RandomSmooth: return "random-smooth";
    case PerturbationKind::ModeBump: return "mode-bump";
    case PerturbationKind::PhaseRamp: return "phase-ramp";
  }
  return "?";
}

inline PerturbationKind parse_perturbation_kind(const std::string& s) {
  if (s == "random-smooth") return PerturbationKind::RandomSmooth;
  if (s == "mode-bump") return PerturbationKind::ModeBump;
  if (s == "phase-ramp") return PerturbationKind::PhaseRamp;
  throw DomainError("unknown perturbation kind '" + s + "'");
}

/// Root-mean-square radius of |u|^2 about the origin.
inline double rms_width(const ComplexField& u) {
  const Grid& g = u.grid();
  double m2 = 0.0, m0 = 0.0;
  for (std::size_t f = 0; f < g.size(); ++f) {
    const auto idx = g.unflatten(f);
    double r2 = 0.0;
    for (std::size_t j = 0; j < g.rank(); ++j) r2 += g.coordinate(j, idx[j]) * g.coordinate(j, idx[j]);
    m2 += r2 * std::norm(u[f]);
    m0 += std::norm(u[f]);
  }
  if (!(m0 > 0.0)) throw DomainError("width of a zero field");
  return std::sqrt(m2 / m0);
}

/// Perturbation direction xi with ||xi||_{H^s} = ||u||_{H^s}.
///   random-smooth: |u| times a real Gaussian random field with correlation length ~ width/2.
///   mode-bump:     |u| cos(x_1 / width).
///   phase-ramp:    i (L_1 / 2 pi) sin(2 pi x_1 / L_1) u / width, a periodic version of i x_1 u / width.
inline ComplexField make_perturbation(const ComplexField& u, PerturbationKind kind, double s, std::uint64_t seed) {
  const Grid& g = u.grid();
  const double w = rms_width(u);
  const double len = g.length(0);
  ComplexField xi(g);
  switch (kind) {
    case PerturbationKind::RandomSmooth: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal;
      std::vector<Complex> hat(g.size());
      const double kc = 2.0 / w;
      for (std::size_t f = 0; f < g.size(); ++f) {
        const auto idx = g.unflatten(f);
        double k2 = 0.0;
        for (std::size_t j = 0; j < g.rank(); ++j) k2 += g.wavenumber(j, idx[j]) * g.wavenumber(j, idx[j]);
        const double a = normal(rng), b = normal(rng);
        hat[f] = Complex(a, b) * std::exp(-0.5 * k2 / (kc * kc));
      }
      fft::inverse(g.dims(), hat);
      for (std::size_t f = 0; f < g.size(); ++f) xi[f] = hat[f].real() * std::abs(u[f]);
      break;
    }
    case PerturbationKind::ModeBump:
      for (std::size_t f = 0; f < g.size(); ++f) {
        const double x = g.coordinate(0, g.unflatten(f)[0]);
        xi[f] = std::cos(x / w) * std::abs(u[f]);
      }
      break;
    case PerturbationKind::PhaseRamp:
      for (std::size_t f = 0; f < g.size(); ++f) {
        const double x = g.coordinate(0, g.unflatten(f)[0]);
        const double ramp = len / (2.0 * std::numbers::pi) * std::sin(2.0 * std::numbers::pi * x / len) / w;
        xi[f] = Complex(0.0, ramp) * u[f];
      }
      break;
  }
  const double nx = hs_norm(xi, s);
  if (!(nx > 0.0)) throw DomainError("degenerate perturbation");
  xi *= hs_norm(u, s) / nx;
  return xi;
}

struct StabilityRow {
  double delta = 0.0;
  PerturbationKind kind = PerturbationKind::RandomSmooth;
  double initial_distance = 0.0;
  double sup_distance = 0.0;
  double final_time = 0.0;
  std::optional<std::string> error;
};

struct StabilityOptions {
  /// Steps between orbit-distance samples; 0 picks about 200 samples over [0, T].
  std::size_t record_stride = 0;
  std::uint64_t seed = 1;
  /// Sub-grid translation refinement; boosted perturbations drift off grid points.
  bool subgrid = true;
  double bound_fraction = 0.5;
  double slope_min = 0.8;
  double slope_max = 1.2;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double hs_norm = 0.0;
  /// Log-log slope of sup_t distance against delta, per kind (rows with delta > 0 only).
  std::vector<std::pair<PerturbationKind, ExponentFit>> slopes;
  /// max over rows of sup_t distance / delta.
  double constant = 0.0;
  bool bounded_ok = true;
  bool slope_ok = true;
  bool ok() const { return bounded_ok && slope_ok; }
};

/// For each (delta, kind): phi0 = sqrt(lambda) (u + delta xi)/||u + delta xi||, evolved over [0, T];
/// records sup_t of the H^s orbit distance to {e^{i sigma} u(. + y)}.
inline StabilityReport stability_experiment(const PhysicsParams& params, const NonlinearitySpec& spec,
                                            const RieszKernelPlan& plan, const GroundStateResult& gs,
                                            const std::vector<double>& deltas, double T, double dt,
                                            const std::vector<PerturbationKind>& kinds,
                                            const StabilityOptions& options = {}) {
  if (!gs.converged) throw DomainError("stability experiment needs a converged ground state");
  for (double d : deltas)
    if (!(d >= 0.0)) throw DomainError("perturbation sizes must be nonnegative");
  StabilityReport report;
  const auto& u = gs.state;
  report.hs_norm = hs_norm(u, params.s);

  EvolveOptions eo;
  eo.reference = u;
  eo.orbit.subgrid = options.subgrid;
  const auto steps = static_cast<std::size_t>(std::max(1LL, std::llround(T / dt)));
  eo.record_stride = options.record_stride > 0 ? options.record_stride : std::max<std::size_t>(1, steps / 200);

  for (std::size_t k = 0; k < kinds.size(); ++k) {
    const auto xi = make_perturbation(u, kinds[k], params.s, options.seed + k);
    std::vector<std::pair<double, double>> samples;
    for (double delta : deltas) {
      StabilityRow row;
      row.delta = delta;
      row.kind = kinds[k];
      auto phi0 = u + delta * xi;
      phi0 *= std::sqrt(params.lambda / mass(phi0));
      const auto traj = evolve(phi0, T, dt, params, spec, plan, eo);
      row.error = traj.error;
      row.final_time = traj.records.back().t;
      row.initial_distance = traj.records.front().orbit_distance.value_or(0.0);
      for (const auto& r : traj.records) row.sup_distance = std::max(row.sup_distance, r.orbit_distance.value_or(0.0));
      if (row.error || row.sup_distance > options.bound_fraction * report.hs_norm) report.bounded_ok = false;
      if (delta > 0.0) {
        report.constant = std::max(report.constant, row.sup_distance / delta);
        samples.emplace_back(std::log(delta), std::log(row.sup_distance));
      }
      report.rows.push_back(row);
    }
    if (samples.size() >= 2) {
      auto fit = make_exponent_fit(std::string("stability slope ") + to_string(kinds[k]), 1.0, samples);
      if (!(fit.fitted >= options.slope_min && fit.fitted <= options.slope_max)) report.slope_ok = false;
      report.slopes.emplace_back(kinds[k], std::move(fit));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------------------------
// Scaling exponents under the mass-preserving dilation u_kappa = kappa^{1/2} u(kappa^{1/N} .)

namespace detail {

// Pure-power components psi^alpha present in G.
inline std::vector<double> power_components(const NonlinearitySpec& spec) {
  std::vector<double> out;
  if (spec.c2 > 0.0) out.push_back(2.0);
  if (spec.has_power_term()) out.push_back(spec.mu);
  return out;
}

inline RealField power_of_modulus(const ComplexField& u, double alpha) {
  RealField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::abs(u[i]), alpha);
  return out;
}

inline std::string exponent_label(double alpha) {
  if (alpha == 2.0) return "2";
  return "mu";
}

}  // namespace detail

/// Slope fits of log quantity vs log kappa over the dilation family: mass (slope 0), kinetic
/// ||(-Delta)^{s/2} u||^2 (slope 2s/N) and D(|u|^a_i, |u|^a_j) for every pair of power components
/// of G (slope (a_i + a_j)/2 - 1 - beta/N).
inline std::vector<ExponentFit> scaling_exponents(const PhysicsParams& params, const NonlinearitySpec& spec,
                                                  const RieszKernelPlan& plan, const ComplexField& u,
                                                  std::vector<double> kappas = log_ladder(0.5, 2.0, 9),
                                                  const ResolutionLimits& limits = {}) {
  require_same_grid(u.grid(), plan.grid());
  const double n = static_cast<double>(params.dimension);
  const auto alphas = detail::power_components(spec);

  std::vector<std::pair<double, double>> s_mass, s_kin;
  std::vector<std::vector<std::pair<double, double>>> s_int(alphas.size() * alphas.size());
  for (double kappa : kappas) {
    const auto v = dilate(u, kappa, limits);
    const double lk = std::log(kappa);
    s_mass.emplace_back(lk, std::log(mass(v)));
    s_kin.emplace_back(lk, std::log(kinetic(v, params.s)));
    for (std::size_t i = 0; i < alphas.size(); ++i)
      for (std::size_t j = i; j < alphas.size(); ++j)
        s_int[i * alphas.size() + j].emplace_back(
            lk, std::log(interaction_D(detail::power_of_modulus(v, alphas[i]), detail::power_of_modulus(v, alphas[j]), plan)));
  }

  std::vector<ExponentFit> fits;
  fits.push_back(make_exponent_fit("mass", 0.0, std::move(s_mass)));
  fits.push_back(make_exponent_fit("kinetic", 2.0 * params.s / n, std::move(s_kin)));
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = i; j < alphas.size(); ++j)
      fits.push_back(make_exponent_fit(
          "interaction_" + detail::exponent_label(alphas[i]) + "_" + detail::exponent_label(alphas[j]),
          0.5 * (alphas[i] + alphas[j]) - 1.0 - params.beta / n, std::move(s_int[i * alphas.size() + j])));
  return fits;
}

// ---------------------------------------------------------------------------------------------
// Hardy-Littlewood-Sobolev / Gagliardo-Nirenberg exponents

/// The printed exponent (N + beta)/s - (N/(2s) - 1)(mu_i + mu_j).
inline double hls_gamma(int dimension, double s, double beta, double mu_i, double mu_j) {
  const double n = static_cast<double>(dimension);
  return (n + beta) / s - (n / (2.0 * s) - 1.0) * (mu_i + mu_j);
}

/// e_1 = (4s + beta - N)/(2s + beta - N).
inline double young_e1(int dimension, double s, double beta) {
  const double n = static_cast<double>(dimension);
  return (4.0 * s + beta - n) / (2.0 * s + beta - n);
}

/// e_2 = (2s mu + beta - N(mu - 1))/(2s + beta - N(mu - 1)).
inline double young_e2(int dimension, double s, double beta, double mu) {
  const double n = static_cast<double>(dimension);
  return (2.0 * s * mu + beta - n * (mu - 1.0)) / (2.0 * s + beta - n * (mu - 1.0));
}

/// e_3 = 1 + 2s mu/(4s - N mu + 2 beta).
inline double young_e3(int dimension, double s, double beta, double mu) {
  const double n = static_cast<double>(dimension);
  return 1.0 + 2.0 * s * mu / (4.0 * s - n * mu + 2.0 * beta);
}

struct HlsPair {
  int i = 1, j = 1;
  double mu_i = 2.0, mu_j = 2.0;
  /// The printed formula; it is the exponent carried by ||u||_2.
  double gamma = 0.0;
  /// mu_i + mu_j - gamma: the exponent carried by ||u||_{H^s-dot}.
  double gamma_hs = 0.0;
  /// The bound is meaningful only when gamma_hs lies in [0, 2].
  bool valid = true;
};

struct GnHlsExponents {
  std::vector<HlsPair> pairs;  // (1,1), (1,2), (2,2)
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  bool young_ok = true;
  std::vector<std::string> flags;
};

inline GnHlsExponents gn_hls_exponents(const PhysicsParams& params, const NonlinearitySpec& spec) {
  GnHlsExponents out;
  const double mus[2] = {2.0, spec.mu};
  for (int i = 1; i <= 2; ++i)
    for (int j = i; j <= 2; ++j) {
      HlsPair p;
      p.i = i;
      p.j = j;
      p.mu_i = mus[i - 1];
      p.mu_j = mus[j - 1];
      p.gamma = hls_gamma(params.dimension, params.s, params.beta, p.mu_i, p.mu_j);
      p.gamma_hs = p.mu_i + p.mu_j - p.gamma;
      p.valid = p.gamma_hs >= 0.0 && p.gamma_hs <= 2.0;
      if (!p.valid)
        out.flags.push_back("D_" + std::to_string(i) + std::to_string(j) + ": H^s exponent " +
                            std::to_string(p.gamma_hs) + " outside [0, 2], bound form invalid");
      out.pairs.push_back(p);
    }
  out.e1 = young_e1(params.dimension, params.s, params.beta);
  out.e2 = young_e2(params.dimension, params.s, params.beta, spec.mu);
  out.e3 = young_e3(params.dimension, params.s, params.beta, spec.mu);
  for (auto [name, e] : {std::pair{"e1", out.e1}, std::pair{"e2", out.e2}, std::pair{"e3", out.e3}}) {
    if (!(std::isfinite(e) && e > 1.0)) {
      out.young_ok = false;
      out.flags.push_back(std::string(name) + " = " + std::to_string(e) + " is not a finite exponent above 1");
    }
  }
  return out;
}

struct HlsSweep {
  HlsPair pair;
  /// (amplitude, dilation, D_ij / bound).
  std::vector<std::array<double, 3>> samples;
  /// Measured sup of the ratio: an estimate of the unknown constant.
  double eta = 0.0;
  /// Slopes of log ratio against log amplitude and log dilation (orthogonal design).
  ExponentFit amplitude_trend;
  ExponentFit dilation_trend;
  /// Same dilation slope with the two norm exponents interchanged.
  double dilation_trend_interchanged = 0.0;
  bool trend_ok = false;
};

/// Evaluates D_ij(|v|) / (||v||_2^gamma ||v||_{H^s-dot}^{gamma_hs}) over v = a u_kappa for the
/// full (amplitude, dilation) product ladder.
inline std::vector<HlsSweep> hls_ratio_sweep(const PhysicsParams& params, const NonlinearitySpec& spec,
                                             const RieszKernelPlan& plan, const ComplexField& u,
                                             const std::vector<double>& amplitudes = log_ladder(0.5, 2.0, 5),
                                             const std::vector<double>& dilations = log_ladder(0.5, 2.0, 5),
                                             double max_trend = 0.05, const ResolutionLimits& limits = {}) {
  require_same_grid(u.grid(), plan.grid());
  const auto ex = gn_hls_exponents(params, spec);
  std::vector<HlsSweep> out;
  for (const auto& p : ex.pairs) {
    HlsSweep sw;
    sw.pair = p;
    out.push_back(sw);
  }
  std::vector<std::vector<std::pair<double, double>>> by_amp(out.size()), by_dil(out.size()), by_dil_x(out.size());
  for (double kappa : dilations) {
    const auto base = dilate(u, kappa, limits);
    for (double a : amplitudes) {
      auto v = base;
      v *= a;
      const double l2 = std::sqrt(mass(v));
      const double hs = std::sqrt(kinetic(v, params.s));
      for (std::size_t q = 0; q < out.size(); ++q) {
        const auto& p = out[q].pair;
        const double d = interaction_D(detail::power_of_modulus(v, p.mu_i), detail::power_of_modulus(v, p.mu_j), plan);
        const double ratio = d / (std::pow(l2, p.gamma) * std::pow(hs, p.gamma_hs));
        const double ratio_x = d / (std::pow(l2, p.gamma_hs) * std::pow(hs, p.gamma));
        out[q].samples.push_back({a, kappa, ratio});
        out[q].eta = std::max(out[q].eta, ratio);
        by_amp[q].emplace_back(std::log(a), std::log(ratio));
        by_dil[q].emplace_back(std::log(kappa), std::log(ratio));
        by_dil_x[q].emplace_back(std::log(kappa), std::log(ratio_x));
      }
    }
  }
  for (std::size_t q = 0; q < out.size(); ++q) {
    const std::string tag = "D_" + std::to_string(out[q].pair.i) + std::to_string(out[q].pair.j);
    out[q].amplitude_trend = make_exponent_fit(tag + " amplitude trend", 0.0, by_amp[q]);
    out[q].dilation_trend = make_exponent_fit(tag + " dilation trend", 0.0, by_dil[q]);
    out[q].dilation_trend_interchanged = fit_line(by_dil_x[q]).slope;
    out[q].trend_ok = out[q].amplitude_trend.abs_error <= max_trend && out[q].dilation_trend.abs_error <= max_trend;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Subadditivity of lambda -> I_lambda

struct SubadditivityRow {
  double pi = 0.0, lambda = 0.0;
  double I_lambda = 0.0, I_pi = 0.0, I_rest = 0.0;
  /// I_pi + I_{lambda - pi} - I_lambda.
  double gap = 0.0;
  /// 10 x the sum of the three energy uncertainties.
  double margin = 0.0;
  bool ok = false;
};

struct ThetaScalingRow {
  double theta = 0.0, lambda = 0.0;
  double I_theta_lambda = 0.0;
  /// theta^{kappa~ (1 + 2s/N)} I_lambda.
  double bound = 0.0;
  bool ok = false;
};

struct ContinuityRow {
  double eps = 0.0;
  double difference = 0.0;
};

struct SubadditivityOptions {
  /// Exponent kappa~ in I_{theta lambda} <= theta^{kappa~ (1 + 2s/N)} I_lambda; must exceed N/(N + 2s).
  double kappa_tilde = 1.0;
  double margin_factor = 10.0;
  /// Continuity proxy |I_{lambda0 (1 + eps)} - I_lambda0| along `eps` (skipped when empty).
  double continuity_base = 1.0;
  std::vector<double> eps;
};

struct SubadditivityReport {
  std::vector<SubadditivityRow> rows;
  std::vector<ThetaScalingRow> theta_rows;
  std::vector<ContinuityRow> continuity;
  bool all_negative = true;
  /// |I_lambda| strictly increasing in lambda, so I_lambda -> 0^- as lambda -> 0.
  bool vanishing_at_zero = true;
  bool continuity_ok = true;
  /// log |I_lambda| vs log lambda; the prediction e_1 is exact for pure quadratic G.
  std::optional<ExponentFit> curve_exponent;
  bool ok() const {
    bool rows_ok = true, theta_ok = true;
    for (const auto& r : rows) rows_ok = rows_ok && r.ok;
    for (const auto& r : theta_rows) theta_ok = theta_ok && r.ok;
    return rows_ok && theta_ok && all_negative && vanishing_at_zero && continuity_ok;
  }
};

inline SubadditivityReport subadditivity_check(const MassEnergyCurve& curve, const PhysicsParams& params,
                                               const NonlinearitySpec& spec,
                                               const std::vector<std::pair<double, double>>& pairs,
                                               const SubadditivityOptions& options = {}) {
  const double n = static_cast<double>(params.dimension);
  if (!(options.kappa_tilde > n / (n + 2.0 * params.s)))
    throw DomainError("kappa~ must exceed N/(N + 2s)");
  auto point = [&](double lambda) -> const CurvePoint& {
    const auto* p = curve.find(lambda);
    if (!p) throw DomainError("missing curve point lambda=" + std::to_string(lambda));
    return *p;
  };

  SubadditivityReport rep;
  for (const auto& [pi, lambda] : pairs) {
    if (!(pi > 0.0 && pi < lambda)) throw DomainError("subadditivity pairs need 0 < pi < lambda");
    const auto& a = point(lambda);
    const auto& b = point(pi);
    const auto& c = point(lambda - pi);
    SubadditivityRow r;
    r.pi = pi;
    r.lambda = lambda;
    r.I_lambda = a.energy;
    r.I_pi = b.energy;
    r.I_rest = c.energy;
    r.gap = r.I_pi + r.I_rest - r.I_lambda;
    r.margin = options.margin_factor * (a.energy_uncertainty + b.energy_uncertainty + c.energy_uncertainty);
    r.ok = a.converged && b.converged && c.converged && r.gap > r.margin;
    rep.rows.push_back(r);
  }

  auto pts = curve.points;
  std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.lambda < y.lambda; });
  const double power = options.kappa_tilde * (1.0 + 2.0 * params.s / n);
  std::vector<std::pair<double, double>> logs;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].energy < 0.0)) rep.all_negative = false;
    if (i > 0 && !(std::abs(pts[i].energy) > std::abs(pts[i - 1].energy))) rep.vanishing_at_zero = false;
    if (pts[i].energy < 0.0) logs.emplace_back(std::log(pts[i].lambda), std::log(-pts[i].energy));
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ThetaScalingRow t;
      t.lambda = pts[j].lambda;
      t.theta = pts[i].lambda / pts[j].lambda;
      t.I_theta_lambda = pts[i].energy;
      t.bound = std::pow(t.theta, power) * pts[j].energy;
      const double slack = options.margin_factor * (pts[i].energy_uncertainty + pts[j].energy_uncertainty);
      t.ok = t.I_theta_lambda <= t.bound + slack;
      rep.theta_rows.push_back(t);
    }
  }
  if (logs.size() >= 2) {
    const bool pure_quadratic = spec.c2 > 0.0 && !spec.has_power_term();
    const double predicted = pure_quadratic ? young_e1(params.dimension, params.s, params.beta)
                                            : std::numeric_limits<double>::quiet_NaN();
    rep.curve_exponent = make_exponent_fit("I_lambda power", predicted, logs);
  }

  if (!options.eps.empty()) {
    auto eps = options.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    const double base = point(options.continuity_base).energy;
    for (double e : eps) {
      rep.continuity.push_back({e, std::abs(point(options.continuity_base * (1.0 + e)).energy - base)});
      if (rep.continuity.size() > 1 && !(rep.continuity.back().difference < rep.continuity[rep.continuity.size() - 2].difference))
        rep.continuity_ok = false;
    }
  }
  return rep;
}

}  // namespace fnls
