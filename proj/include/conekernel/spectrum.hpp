#pragma once

// Cone configuration (rho, n, c) and the Bessel orders nu_m attached to the
// spherical harmonics of degree m.

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "conekernel/errors.hpp"

namespace conekernel {

/// Product cone C(rho S^{n-1}) with inverse-square coupling c.
///
/// Holds d = (n-2)/2 and nu0 = sqrt(d^2 + c); construction enforces the
/// subcritical condition c > -(n-2)^2/4.
class ConeParams {
 public:
  ConeParams(double rho, int n, double c) : ConeParams(rho, 0.5 * (n - 2), c, n) {
    if (n < 3) throw DomainError("ConeParams: dimension n must be at least 3");
  }

  /// Real half-dimension d > 0 without an integer n. Used by property tests
  /// over general d; such parameters cannot be serialized.
  static ConeParams with_real_d(double rho, double d, double c) {
    if (!(d > 0.0)) throw DomainError("ConeParams: d must be positive");
    return ConeParams(rho, d, c, kNoDimension);
  }

  double rho() const noexcept { return rho_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }
  double nu0() const noexcept { return nu0_; }

  /// Integer ambient dimension; throws for parameters built from a real d.
  int n() const {
    if (n_ == kNoDimension) throw DomainError("ConeParams: no integer dimension (built from real d)");
    return n_;
  }
  bool has_dimension() const noexcept { return n_ != kNoDimension; }

  /// Decay exponent nu0 - d of the small-x regime.
  double small_x_exponent() const noexcept { return nu0_ - d_; }

  bool operator==(const ConeParams& o) const noexcept {
    return rho_ == o.rho_ && n_ == o.n_ && d_ == o.d_ && c_ == o.c_;
  }

 private:
  static constexpr int kNoDimension = -1;

  ConeParams(double rho, double d, double c, int n) : rho_(rho), n_(n), d_(d), c_(c) {
    if (!std::isfinite(rho) || !(rho > 0.0)) throw DomainError("ConeParams: rho must be positive");
    if (!std::isfinite(c)) throw DomainError("ConeParams: c must be finite");
    if (!(c > -d * d)) {
      throw DomainError("ConeParams: coupling violates the subcritical condition c > -(n-2)^2/4 (c = " +
                        std::to_string(c) + ", bound = " + std::to_string(-d * d) + ")");
    }
    nu0_ = std::sqrt(d * d + c);
  }

  double rho_;
  int n_;
  double d_;
  double c_;
  double nu0_ = 0.0;
};

/// nu_m = sqrt(rho^{-2} m (m + 2d) + d^2 + c).
inline double nu(const ConeParams& p, long m) {
  if (m < 0) throw DomainError("nu: degree must be nonnegative");
  const double mm = static_cast<double>(m);
  const double r2 = p.rho() * p.rho();
  return std::sqrt(mm * (mm + 2.0 * p.d()) / r2 + p.d() * p.d() + p.c());
}

/// nu_m - (m + d)/rho, evaluated without cancellation.
inline double nu_asymptotic_gap(const ConeParams& p, long m) {
  if (m < 1) throw DomainError("nu_asymptotic_gap: m must be at least 1");
  const double linear = (static_cast<double>(m) + p.d()) / p.rho();
  const double d2 = p.d() * p.d();
  const double numerator = d2 + p.c() - d2 / (p.rho() * p.rho());
  return numerator / (nu(p, m) + linear);
}

inline void to_json(nlohmann::json& j, const ConeParams& p) {
  j = nlohmann::json{{"rho", p.rho()}, {"n", p.n()}, {"c", p.c()}};
}

inline ConeParams cone_params_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rho") || !j.contains("n") || !j.contains("c")) {
    throw InputError("ConeParams JSON requires keys rho, n, c");
  }
  if (!j.at("n").is_number_integer()) throw InputError("ConeParams JSON: n must be an integer");
  return ConeParams(j.at("rho").get<double>(), j.at("n").get<int>(), j.at("c").get<double>());
}

}  // namespace conekernel
