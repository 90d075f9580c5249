#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fnls/errors.hpp"

namespace fnls {

/// Dimension N, fractional order s, kernel exponent beta (V = |x|^{beta-N}) and constraint mass lambda.
struct PhysicsParams {
  int dimension = 1;
  double s = 0.5;
  double beta = 0.5;
  double lambda = 1.0;

  /// N - beta <= 2s: the Hartree term is controlled by the kinetic energy.
  bool subcritical() const { return dimension - beta <= 2.0 * s + 1e-15; }
};

/// Two-term nonlinearity G(psi) = c2 psi^2 + cmu psi^mu.
///
/// Its two exponents are the quadratic and power parts mu_1 = 2 and mu_2 = mu used by
/// the interaction estimates in `analysis.hpp`.
struct NonlinearitySpec {
  double c2 = 1.0;
  double cmu = 0.0;
  double mu = 2.0;

  bool has_power_term() const { return cmu > 0.0; }
  bool is_linear() const { return c2 == 0.0 && cmu == 0.0; }

  /// Exponent dominating G near psi = 0.
  double small_amplitude_exponent() const { return c2 > 0.0 ? 2.0 : mu; }
};

namespace detail {
inline void require_nonnegative(double psi) {
  if (!(psi >= 0.0)) throw DomainError("G is defined on psi >= 0, got " + std::to_string(psi));
}
}  // namespace detail

inline double evaluate_G(double psi, const NonlinearitySpec& spec) {
  detail::require_nonnegative(psi);
  double g = spec.c2 * psi * psi;
  if (spec.cmu != 0.0) g += spec.cmu * std::pow(psi, spec.mu);
  return g;
}

/// G'(psi) = 2 c2 psi + mu cmu psi^{mu-1}.
inline double evaluate_Gprime(double psi, const NonlinearitySpec& spec) {
  detail::require_nonnegative(psi);
  double g = 2.0 * spec.c2 * psi;
  if (spec.cmu != 0.0) g += spec.mu * spec.cmu * std::pow(psi, spec.mu - 1.0);
  return g;
}

/// F with G'(psi) = F(psi) psi, i.e. F(psi) = 2 c2 + mu cmu psi^{mu-2}.
inline double evaluate_F(double psi, const NonlinearitySpec& spec) {
  detail::require_nonnegative(psi);
  double f = 2.0 * spec.c2;
  if (spec.cmu != 0.0) f += spec.mu * spec.cmu * std::pow(psi, spec.mu - 2.0);
  return f;
}

enum class Severity {
  Existence,       ///< blocks existence-mode runs
  NegativeEnergy,  ///< the infimum may fail to be negative
  Uniqueness,      ///< outside the proven uniqueness regime (warning only)
};

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::Existence: return "existence";
    case Severity::NegativeEnergy: return "negative-energy";
    case Severity::Uniqueness: return "uniqueness";
  }
  return "?";
}

struct Violation {
  std::string constraint;
  std::string message;
  Severity severity = Severity::Existence;
};

/// One evaluated inequality lower < value < upper (bounds may be +-inf when one-sided).
struct WindowCheck {
  std::string name;
  double lower = -INFINITY;
  double value = 0.0;
  double upper = INFINITY;
  bool ok = false;
};

struct AdmissibilityReport {
  bool existence_ok = true;
  bool uniqueness_ok = false;
  bool negative_energy_ok = true;
  std::vector<Violation> violations;
  std::vector<WindowCheck> checks;

  bool has(Severity severity) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.severity == severity; });
  }

  void merge(const AdmissibilityReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    existence_ok = !has(Severity::Existence);
    negative_energy_ok = negative_energy_ok && other.negative_energy_ok;
    uniqueness_ok = uniqueness_ok || other.uniqueness_ok;
  }
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline WindowCheck window(std::string name, double lower, double value, double upper, bool closed_lower = false,
                          bool closed_upper = false) {
  const bool lo = closed_lower ? value >= lower : value > lower;
  const bool hi = closed_upper ? value <= upper : value < upper;
  return {std::move(name), lower, value, upper, lo && hi};
}

/// Upper end of the mu window [2, 1 + (2s+beta)/N) required by the growth bound.
inline double growth_mu_upper(const PhysicsParams& p) { return 1.0 + (2.0 * p.s + p.beta) / p.dimension; }

inline void basic_ranges(const PhysicsParams& p, const NonlinearitySpec& g, AdmissibilityReport& r) {
  auto add = [&](std::string c, std::string m) { r.violations.push_back({std::move(c), std::move(m), Severity::Existence}); };
  if (p.dimension < 1 || p.dimension > 3) add("dimension", "N must be 1, 2 or 3, got " + std::to_string(p.dimension));
  if (!(p.s > 0.0 && p.s < 1.0)) add("s-range", "need 0 < s < 1, got s=" + fmt(p.s));
  if (!(p.beta > 0.0 && p.beta < p.dimension)) add("beta-range", "need 0 < beta < N, got beta=" + fmt(p.beta));
  if (!(p.lambda > 0.0)) add("lambda-range", "need lambda > 0, got " + fmt(p.lambda));
  if (g.c2 < 0.0 || g.cmu < 0.0) add("coefficients", "c2 and cmu must be nonnegative");
  if (g.is_linear()) add("coefficients", "at least one of c2, cmu must be positive");
}

}  // namespace detail

/// Checks the hypotheses under which the constrained minimization has a minimizer
/// (subcriticality and the mu growth window) and, separately, the small-amplitude
/// exponent window 1 + beta/N < alpha < 1 + (2s+beta)/N that makes the infimum negative.
/// Never throws.
inline AdmissibilityReport validate_existence(const PhysicsParams& p, const NonlinearitySpec& g) {
  AdmissibilityReport r;
  detail::basic_ranges(p, g, r);
  const double n = p.dimension;

  auto sub = detail::window("N-beta<=2s", -INFINITY, n - p.beta, 2.0 * p.s, false, true);
  r.checks.push_back(sub);
  if (!sub.ok)
    r.violations.push_back({"subcriticality",
                            "N - beta = " + detail::fmt(n - p.beta) + " exceeds 2s = " + detail::fmt(2.0 * p.s),
                            Severity::Existence});

  if (g.has_power_term()) {
    auto mu = detail::window("mu-growth-window", 2.0, g.mu, detail::growth_mu_upper(p), true, false);
    r.checks.push_back(mu);
    if (!mu.ok)
      r.violations.push_back({"mu-window",
                              "mu = " + detail::fmt(g.mu) + " outside [2, " + detail::fmt(mu.upper) + ")",
                              Severity::Existence});
  }

  const double alpha = g.small_amplitude_exponent();
  auto aw = detail::window("alpha-window", 1.0 + p.beta / n, alpha, detail::growth_mu_upper(p));
  r.checks.push_back(aw);
  r.negative_energy_ok = aw.ok && !g.is_linear();
  if (!aw.ok)
    r.violations.push_back({"alpha-window",
                            "alpha = " + detail::fmt(alpha) + " outside (" + detail::fmt(aw.lower) + ", " +
                                detail::fmt(aw.upper) + ")",
                            Severity::NegativeEnergy});

  r.existence_ok = !r.has(Severity::Existence);
  return r;
}

/// Checks the windows under which the Cauchy problem has a unique solution. Failures are
/// recorded with `Severity::Uniqueness` and never block a run.
inline AdmissibilityReport validate_uniqueness(const PhysicsParams& p, const NonlinearitySpec& g) {
  AdmissibilityReport r;
  r.negative_energy_ok = true;
  const double n = p.dimension;
  const double s = p.s;
  const double beta = p.beta;
  auto warn = [&](std::string c, std::string m) {
    r.violations.push_back({std::move(c), std::move(m), Severity::Uniqueness});
  };

  if (p.dimension == 1) {
    auto sw = detail::window("uniqueness-s-window", 0.5, s, 1.0);
    r.checks.push_back(sw);
    r.uniqueness_ok = sw.ok;
    if (!sw.ok) warn("uniqueness-s", "N = 1 needs 1/2 < s < 1, got s=" + detail::fmt(s));
    return r;
  }
  if (p.dimension == 2) {
    r.uniqueness_ok = false;
    warn("uniqueness-N2", "uniqueness for N = 2 is not covered by the available estimates");
    return r;
  }

  auto sw = detail::window("uniqueness-s-window", n / (2.0 * (n - 1.0)), s, 1.0);
  const double beta_hi = std::min(n, 1.5 * n - s - n / (4.0 * s));
  auto bw = detail::window("uniqueness-beta-window", n - s + 0.5, beta, beta_hi);
  const double mu_lo = std::max(2.0, 1.0 + (2.0 * beta - n) / (n - 2.0 * s));
  const double mu_hi = 2.0 + n / (n - 2.0 * s) * (2.0 * s - 1.0 - 2.0 * n + 2.0 * beta) / (2.0 * s - 1.0 + n);

  WindowCheck mw;
  if (g.has_power_term()) {
    mw = detail::window("uniqueness-mu-window", mu_lo, g.mu, mu_hi);
  } else {
    // A pure quadratic G satisfies the growth bound for every mu in [2, 1+(2s+beta)/N);
    // the window is met when that interval meets (mu_lo, mu_hi).
    const double lo = std::max(mu_lo, 2.0);
    const double hi = std::min(mu_hi, detail::growth_mu_upper(p));
    mw = {"uniqueness-mu-window", mu_lo, lo, mu_hi, lo < hi};
  }
  r.checks.push_back(sw);
  r.checks.push_back(bw);
  r.checks.push_back(mw);
  if (!sw.ok) warn("uniqueness-s", "s = " + detail::fmt(s) + " outside (" + detail::fmt(sw.lower) + ", 1)");
  if (!bw.ok)
    warn("uniqueness-beta", "beta = " + detail::fmt(beta) + " outside (" + detail::fmt(bw.lower) + ", " +
                                detail::fmt(bw.upper) + ")");
  if (!mw.ok)
    warn("uniqueness-mu", "mu window (" + detail::fmt(mu_lo) + ", " + detail::fmt(mu_hi) + ") not satisfied");
  r.uniqueness_ok = sw.ok && bw.ok && mw.ok;
  return r;
}

/// Existence and uniqueness checks combined into one report.
inline AdmissibilityReport assess(const PhysicsParams& p, const NonlinearitySpec& g) {
  auto r = validate_existence(p, g);
  r.merge(validate_uniqueness(p, g));
  return r;
}

}  // namespace fnls
