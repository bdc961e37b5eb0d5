#pragma once

// Direct summation of the Bessel-Gegenbauer series
//
//   I(x, phi) = x^{-d} sum_m e^{-i pi nu_m / 2} J_{nu_m}(x) (m + d)/d C_m^d(cos phi)
//
// with a certified truncation, and assembly of the Schroedinger kernel on the
// cone from it.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "conekernel/compensated.hpp"
#include "conekernel/errors.hpp"
#include "conekernel/specfun.hpp"
#include "conekernel/spectrum.hpp"

namespace conekernel {

using ComplexValue = std::complex<double>;

/// Spectral coordinates: x = r1 r2 / (2t) and the angle phi between y1, y2.
struct KernelPoint {
  double x;
  double phi;

  KernelPoint(double x_, double phi_) : x(x_), phi(phi_) {
    if (!std::isfinite(x) || !(x > 0.0)) throw DomainError("KernelPoint: x must be positive");
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw DomainError("KernelPoint: phi must lie in [0, pi]");
  }
};

/// Physical coordinates (t, r1, r2) and the spherical angle phi.
struct PhysicalPoint {
  double t;
  double r1;
  double r2;
  double phi;

  PhysicalPoint(double t_, double r1_, double r2_, double phi_) : t(t_), r1(r1_), r2(r2_), phi(phi_) {
    if (!(t > 0.0) || !(r1 > 0.0) || !(r2 > 0.0) || !std::isfinite(t) || !std::isfinite(r1) ||
        !std::isfinite(r2)) {
      throw DomainError("PhysicalPoint: t, r1, r2 must be positive");
    }
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw DomainError("PhysicalPoint: phi must lie in [0, pi]");
  }

  double spectral_x() const noexcept { return r1 * r2 / (2.0 * t); }
  KernelPoint spectral() const { return {spectral_x(), phi}; }
};

struct SeriesResult {
  ComplexValue value;
  long terms_used = 0;  // highest degree M included
  double tail_bound = 0.0;
  /// Propagated bound on the Bessel evaluation errors.
  double special_function_error = 0.0;
};

/// Result of the tail certification: include degrees 0..index.
struct TruncationCertificate {
  long index = 0;
  double tail_bound = 0.0;
};

inline constexpr long kMaxTruncationIndex = 10'000'000;

namespace detail {

// log of x^{-d} (m+d)/d C_m^d(1) (x/2)^{nu_m} / Gamma(nu_m + 1), which bounds the
// modulus of the m-th summand for every phi.
inline double log_tail_term(const ConeParams& p, double x, long m) {
  const double d = p.d();
  const double v = nu(p, m);
  return -d * std::log(x) + std::log((static_cast<double>(m) + d) / d) + log_gegenbauer_at_one(m, d) +
         v * std::log(0.5 * x) - log_gamma(v + 1.0);
}

}  // namespace detail

/// Smallest M whose analytic tail bound sum_{m>M} (term bound) is below tol.
inline TruncationCertificate certify_truncation(const ConeParams& p, double x, double tol) {
  if (!std::isfinite(x) || !(x > 0.0)) throw DomainError("truncation_index: x must be positive");
  if (!(tol > 0.0)) throw DomainError("truncation_index: tol must be positive");
  // The terms only start to decay once nu_m exceeds x.
  if (nu(p, kMaxTruncationIndex) <= x) {
    throw CapacityError("truncation_index: tail bound not certified within m <= 1e7");
  }
  const double log_stop = std::log(tol / 10.0);
  std::vector<double> terms;
  double closure = 0.0;
  double prev_log = -std::numeric_limits<double>::infinity();
  for (long m = 0;; ++m) {
    if (m > kMaxTruncationIndex) {
      throw CapacityError("truncation_index: tail bound not certified within m <= 1e7");
    }
    const double lt = detail::log_tail_term(p, x, m);
    terms.push_back(std::exp(lt));
    const double log_ratio = lt - prev_log;
    prev_log = lt;
    // Past nu_m = x the term ratios decrease monotonically, so a ratio r < 1/2
    // closes the remainder geometrically: sum_{k>m} T_k <= T_m r / (1 - r).
    if (m > 0 && lt < log_stop && log_ratio < -std::numbers::ln2 && nu(p, m) > x) {
      const double r = std::exp(log_ratio);
      closure = terms.back() * r / (1.0 - r);
      break;
    }
  }
  // tail(M) = sum_{m=M+1}^{end} T_m + closure, found by a backward sweep.
  const long end = static_cast<long>(terms.size()) - 1;
  std::vector<double> tails(terms.size());
  CompensatedSum acc;
  acc.add(closure);
  for (long m = end; m >= 0; --m) {
    tails[m] = acc.value();
    acc.add(terms[m]);
  }
  for (long m = 0; m <= end; ++m) {
    if (tails[m] < tol) return {m, tails[m]};
  }
  return {end, tails[end]};
}

inline long truncation_index(const ConeParams& p, double x, double tol) {
  return certify_truncation(p, x, tol).index;
}

/// Phase factor e^{-i pi nu / 2}, reduced modulo 4 before scaling.
inline ComplexValue quarter_turn_phase(double v) {
  const double reduced = std::fmod(v, 4.0);
  const double angle = -0.5 * std::numbers::pi * reduced;
  return {std::cos(angle), std::sin(angle)};
}

/// The phi-independent part of the series at one x:
///   b_m = x^{-d} e^{-i pi nu_m/2} J_{nu_m}(x) (m + d)/d,  m = 0..M.
///
/// Evaluating many angles at the same x reuses the Bessel values.
class SeriesEvaluator {
 public:
  SeriesEvaluator(const ConeParams& p, double x, double tol) : params_(p), x_(x) {
    const TruncationCertificate cert = certify_truncation(p, x, tol);
    tail_bound_ = cert.tail_bound;
    build(cert.index);
  }

  /// Fixed number of terms, no tail certificate (brute-force partial sums).
  static SeriesEvaluator with_terms(const ConeParams& p, double x, long max_m) {
    if (!(x > 0.0)) throw DomainError("SeriesEvaluator: x must be positive");
    if (max_m < 0) throw DomainError("SeriesEvaluator: term count must be nonnegative");
    return SeriesEvaluator(p, x, max_m);
  }

  const ConeParams& params() const noexcept { return params_; }
  double x() const noexcept { return x_; }
  long max_degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  double tail_bound() const noexcept { return tail_bound_; }
  const std::vector<ComplexValue>& coefficients() const noexcept { return coeffs_; }

  /// Series value at angle phi, summed in ascending m.
  SeriesResult at(double phi) const {
    if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw DomainError("SeriesEvaluator: phi must lie in [0, pi]");
    const double t = angle_cosine(phi);
    const std::vector<double> gegen = gegenbauer_sequence(max_degree(), params_.d(), t);
    CompensatedComplexSum acc;
    for (std::size_t m = 0; m < coeffs_.size(); ++m) acc.add(coeffs_[m] * gegen[m]);
    return {acc.value(), max_degree(), tail_bound_, special_error_};
  }

  /// cos(phi) with the endpoints mapped to +-1 exactly.
  static double angle_cosine(double phi) {
    if (phi == 0.0) return 1.0;
    if (phi == std::numbers::pi) return -1.0;
    return std::cos(phi);
  }

 private:
  SeriesEvaluator(const ConeParams& p, double x, long max_m) : params_(p), x_(x) { build(max_m); }

  void build(long max_m) {
    const double d = params_.d();
    const double x_pow = std::pow(x_, -d);
    coeffs_.resize(static_cast<std::size_t>(max_m) + 1);
    std::optional<BesselQuadraturePlan> plan;
    // Series use is monotone in the order: only low degrees can need quadrature.
    if (!detail::bessel_use_series(nu(params_, 0), x_)) plan.emplace(x_, nu(params_, max_m));
    CompensatedSum err;
    for (long m = 0; m <= max_m; ++m) {
      const double v = nu(params_, m);
      const EstimatedValue j = detail::bessel_use_series(v, x_) ? detail::bessel_j_series(v, x_) : plan->evaluate(v);
      const double weight = x_pow * (static_cast<double>(m) + d) / d;
      coeffs_[m] = quarter_turn_phase(v) * (weight * j.value);
      err.add(weight * std::exp(log_gegenbauer_at_one(m, d)) * j.error);
    }
    special_error_ = err.value();
  }

  ConeParams params_;
  double x_;
  double tail_bound_ = 0.0;
  double special_error_ = 0.0;
  std::vector<ComplexValue> coeffs_;
};

/// The series I_{rho,d,c}(x, phi) with certified truncation error <= tol.
inline SeriesResult eval_I(const ConeParams& p, const KernelPoint& pt, double tol) {
  return SeriesEvaluator(p, pt.x, tol).at(pt.phi);
}

/// |c_n'| fixed so that rho = 1, c = 0 reproduces the free modulus (4 pi t)^{-n/2}:
/// kappa_n = d 2^d Gamma(d) (2 pi)^{-n/2}.
inline double kernel_constant(const ConeParams& p) {
  const double d = p.d();
  const double n = 2.0 * d + 2.0;
  return d * std::exp(d * std::numbers::ln2 + log_gamma(d) - 0.5 * n * std::log(2.0 * std::numbers::pi));
}

/// Propagator kernel e^{itH}(r1, y1, r2, y2) for t > 0:
///   (kappa_n / rho^{n-1}) (2t)^{-n/2} e^{i (r1^2 + r2^2)/(4t)} (1/i) I(r1 r2/(2t), phi).
///
/// The unit factor e^{-(r1^2+r2^2)/(4it)} equals e^{+i(r1^2+r2^2)/(4t)}. The sign
/// of c_n' is not determined, so only the modulus is calibrated. Negative times
/// follow from e^{-itH}(r1,y1,r2,y2) = conj(e^{itH}(r2,y2,r1,y1)).
inline ComplexValue eval_kernel(const ConeParams& p, const PhysicalPoint& pt, double tol) {
  const double d = p.d();
  const double n = 2.0 * d + 2.0;
  const SeriesResult series = eval_I(p, pt.spectral(), tol);
  const double prefactor = kernel_constant(p) * std::pow(p.rho(), -(n - 1.0)) * std::pow(2.0 * pt.t, -0.5 * n);
  const double quadratic_phase = (pt.r1 * pt.r1 + pt.r2 * pt.r2) / (4.0 * pt.t);
  const ComplexValue unit(std::cos(quadratic_phase), std::sin(quadratic_phase));
  const ComplexValue inv_i(0.0, -1.0);
  return prefactor * unit * inv_i * series.value;
}

}  // namespace conekernel
