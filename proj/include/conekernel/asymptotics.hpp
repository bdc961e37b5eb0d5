#pragma once

// Closed-form predictors: the large-x principal term of the series at the
// conjugate angles phi0 in {0, pi}, and the decay envelopes.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conekernel/critical_points.hpp"
#include "conekernel/errors.hpp"
#include "conekernel/kernel_series.hpp"
#include "conekernel/specfun.hpp"
#include "conekernel/spectrum.hpp"

namespace conekernel {

/// How a member of D_{rho,s}(phi0) is matched to the sign in its phase.
///
/// Literal: the phase carries the label s of the D set.
/// Algebraic: the phase carries -s, the sign of the C branch that solves the
/// same equation (C(s1, q) and D(-s1, -q) coincide at phi0 = 0).
enum class Pairing { Literal, Algebraic };

inline std::string to_string(Pairing p) { return p == Pairing::Literal ? "literal" : "algebraic"; }

/// amplitude * e^{i (sigma1 frequency x + phase_constant)} * x^d
struct PrincipalTerm {
  double amplitude;
  double frequency;
  double phase_constant;
  int sigma1;      // sign in the phase
  double mu0;
  int set_sigma1;  // label of the D set the value came from
  long q;          // winding index in that D set
};

inline double principal_amplitude(const ConeParams& p, double mu0) {
  const double d = p.d();
  return std::exp((2.0 * d + 1.0) * std::log(p.rho()) + 2.0 * d * std::log(mu0) - std::log(d) - log_gamma(2.0 * d));
}

inline double principal_phase_constant(const ConeParams& p, int sigma1, double mu0) {
  const double d = p.d();
  const double rho = p.rho();
  return -sigma1 * (d / rho) * arccos_unit(mu0) - std::numbers::pi * d / (2.0 * rho);
}

namespace detail {

inline void check_optimality_regime(double rho) {
  if (inverse_in_even_naturals(rho)) {
    throw UnsupportedRegimeError("principal term: 1/rho lies in 2N (within 1e-9); the optimality statement requires "
                                 "n >= 3 and 1/rho not in 2N");
  }
}

}  // namespace detail

/// Every term of the principal prediction at phi0 under the given pairing.
inline std::vector<PrincipalTerm> principal_terms(const ConeParams& p, ConjugateAngle phi0,
                                                  Pairing pairing = Pairing::Algebraic) {
  detail::check_optimality_regime(p.rho());
  std::vector<PrincipalTerm> out;
  for (int s : {1, -1}) {
    for (const CriticalDatum& dat : conjugate_frequencies(p.rho(), s, phi0)) {
      const int phase_sign = pairing == Pairing::Literal ? s : -s;
      out.push_back({principal_amplitude(p, dat.mu0), dat.frequency, principal_phase_constant(p, phase_sign, dat.mu0),
                     phase_sign, dat.mu0, s, dat.branch.q});
    }
  }
  return out;
}

/// P(x) = sum of amplitude e^{i(sigma1 sqrt(1-mu0^2) x + L)} x^d over the principal terms.
inline ComplexValue principal_prediction(const std::vector<PrincipalTerm>& terms, const ConeParams& p, double x) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("principal_prediction: x must be at least 1");
  const double growth = std::pow(x, p.d());
  ComplexValue sum{0.0, 0.0};
  for (const auto& t : terms) sum += t.amplitude * growth * std::polar(1.0, t.sigma1 * t.frequency * x + t.phase_constant);
  return sum;
}

inline ComplexValue principal_prediction(const ConeParams& p, ConjugateAngle phi0, double x,
                                         Pairing pairing = Pairing::Algebraic) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("principal_prediction: x must be at least 1");
  return principal_prediction(principal_terms(p, phi0, pairing), p, x);
}

/// (1 + 1/x)^{-nu0 + d}
inline double smallx_envelope(const ConeParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("smallx_envelope: x must be positive");
  return std::exp(-p.small_x_exponent() * std::log1p(1.0 / x));
}

enum class Regime { Interior, General };

inline std::string to_string(Regime r) { return r == Regime::Interior ? "interior" : "general"; }

/// Envelope of |I(x, phi)| in series units (the t^{-n/2} factor removed).
inline double series_envelope(const ConeParams& p, double x, Regime regime) {
  const double base = smallx_envelope(p, x);
  if (regime == Regime::Interior) return base;
  return base * std::exp(p.d() * std::log1p(x));
}

/// t^{-n/2} (1 + 2t/(r1 r2))^{-nu0+d}, times (1 + r1 r2/(2t))^d in the general regime.
inline double dispersive_envelope(const ConeParams& p, const PhysicalPoint& pt, Regime regime) {
  const double n = 2.0 * p.d() + 2.0;
  return std::pow(pt.t, -0.5 * n) * series_envelope(p, pt.spectral_x(), regime);
}

inline void to_json(nlohmann::json& j, const PrincipalTerm& t) {
  j = nlohmann::json{{"sigma1", t.sigma1},
                     {"mu0", t.mu0},
                     {"amplitude", t.amplitude},
                     {"frequency", t.frequency},
                     {"phase_constant", t.phase_constant}};
}

}  // namespace conekernel
