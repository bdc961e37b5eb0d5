#pragma once

// Special functions consumed by the spectral series: real-order Bessel J_nu,
// Gegenbauer polynomials, log-gamma and the phase profile h1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "conekernel/compensated.hpp"
#include "conekernel/errors.hpp"

namespace conekernel {

/// Absolute/relative accuracy request for special-function evaluation.
struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;

  Tolerance() = default;
  Tolerance(double abs, double rel) : abs_tol(abs), rel_tol(rel) {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw DomainError("Tolerance: abs_tol and rel_tol must be positive");
    }
  }

  /// Admissible absolute error for a result of magnitude `value`.
  double allowed(double value) const noexcept {
    return std::max(abs_tol, rel_tol * std::fabs(value));
  }
};

/// Value together with an a-posteriori absolute error estimate.
struct EstimatedValue {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// zeta(2), zeta(3), ..., zeta(57)
inline constexpr std::array<double, 56> kZeta = {
    1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915,
    1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
    1.0040773561979443394, 1.0020083928260822144, 1.0009945751278180853,
    1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
    1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519,
    1.0000076371976378998, 1.0000038172932649998, 1.0000019082127165539,
    1.0000009539620338728, 1.0000004769329867878, 1.0000002384505027277,
    1.0000001192199259653, 1.0000000596081890513, 1.0000000298035035147,
    1.0000000149015548284, 1.0000000074507117898, 1.0000000037253340248,
    1.0000000018626597235, 1.0000000009313274324, 1.0000000004656629065,
    1.0000000002328311834, 1.0000000001164155017, 1.0000000000582077209,
    1.0000000000291038504, 1.0000000000145519219, 1.0000000000072759598,
    1.0000000000036379795, 1.0000000000018189897, 1.0000000000009094948,
    1.0000000000004547474, 1.0000000000002273737, 1.0000000000001136868,
    1.0000000000000568434, 1.0000000000000284217, 1.0000000000000142109,
    1.0000000000000071054, 1.0000000000000035527, 1.0000000000000017764,
    1.0000000000000008882, 1.0000000000000004441, 1.000000000000000222,
    1.000000000000000111,  1.0000000000000000555, 1.0000000000000000278,
    1.0000000000000000139, 1.0000000000000000069};

inline constexpr double kEulerGamma = 0.57721566490153286061;

// ln Gamma(1 + e) for |e| <= 1/2 from the Taylor series in zeta values.
inline double log_gamma_1p(double e) {
  double acc = 0.0;
  for (std::size_t i = kZeta.size(); i-- > 0;) {
    const double k = static_cast<double>(i + 2);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    acc = acc * e + sign * kZeta[i] / k;
  }
  return e * (-kEulerGamma + e * acc);
}

// Stirling series, accurate to ~1e-16 relative for z >= 10.
inline double log_gamma_stirling(double z) {
  constexpr std::array<double, 8> kCoef = {
      1.0 / 12.0,         -1.0 / 360.0,       1.0 / 1260.0,    -1.0 / 1680.0,
      1.0 / 1188.0,       -691.0 / 360360.0,  1.0 / 156.0,     -3617.0 / 122400.0};
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (std::size_t i = kCoef.size(); i-- > 0;) series = series * inv2 + kCoef[i];
  series *= inv;
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  return (z - 0.5) * std::log(z) - z + kHalfLog2Pi + series;
}

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::fabs(dz) < 1e-17) break;
      }
      nodes[i] = -z;
      nodes[n - 1 - i] = z;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  static const GaussLegendre& get(int n) {
    static const GaussLegendre rule10(10);
    static const GaussLegendre rule16(16);
    if (n == 10) return rule10;
    return rule16;
  }
};

// sin(pi * v) with exact zeros at integers.
inline double sin_pi(double v) {
  const double r = v - 2.0 * std::floor(v / 2.0);  // [0, 2)
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r < 0.5) return std::sin(std::numbers::pi * r);
  if (r < 1.5) return std::sin(std::numbers::pi * (1.0 - r));
  return -std::sin(std::numbers::pi * (2.0 - r));
}

}  // namespace detail

/// ln Gamma(z) for z > 0.
inline double log_gamma(double z) {
  if (!std::isfinite(z) || !(z > 0.0)) {
    throw DomainError("log_gamma: argument must be positive and finite");
  }
  if (z == 1.0 || z == 2.0) return 0.0;
  if (z < 0.5) return log_gamma(z + 1.0) - std::log(z);
  if (z < 1.5) return detail::log_gamma_1p(z - 1.0);
  if (z < 2.5) return std::log1p(z - 2.0) + detail::log_gamma_1p(z - 2.0);
  if (z < 3.5) {
    const double e = z - 3.0;
    return std::log1p(e) + std::log1p(e + 1.0) + detail::log_gamma_1p(e);
  }
  if (z >= 10.0) return detail::log_gamma_stirling(z);
  double product = 1.0;
  double shifted = z;
  while (shifted < 10.0) {
    product *= shifted;
    shifted += 1.0;
  }
  return detail::log_gamma_stirling(shifted) - std::log(product);
}

/// cos^{-1}(mu) for mu in [0, 1], range [0, pi/2], accurate near mu = 1.
inline double arccos_unit(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("arccos_unit: mu must lie in [0, 1]");
  return 2.0 * std::asin(std::sqrt((1.0 - mu) / 2.0));
}

/// h1(mu) = sqrt(1 - mu^2) - mu * cos^{-1}(mu) on [0, 1].
inline double h1(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("h1: mu must lie in [0, 1]");
  const double beta = arccos_unit(mu);
  if (beta < 0.5) {
    // sin b - b cos b = sum_{k>=1} (-1)^{k+1} 2k b^{2k+1} / (2k+1)!
    const double b2 = beta * beta;
    double term = beta * b2 / 6.0;  // b^3 / 3!
    double sum = 0.0;
    for (int k = 1; k < 20; ++k) {
      const double contrib = ((k % 2 == 1) ? 1.0 : -1.0) * 2.0 * k * term;
      sum += contrib;
      if (std::fabs(contrib) < 1e-18 * std::fabs(sum)) break;
      term *= b2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return sum;
  }
  return std::sin(beta) - mu * beta;
}

/// h1'(mu) = -cos^{-1}(mu).
inline double h1_prime(double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("h1_prime: mu must lie in [0, 1]");
  return -arccos_unit(mu);
}

inline constexpr double kMaxGegenbauerOrder = 10.0;

namespace detail {
inline void check_gegenbauer_args(double d, double t) {
  if (!(d > 0.0) || d > kMaxGegenbauerOrder) {
    throw DomainError("gegenbauer: parameter d must lie in (0, 10]");
  }
  if (!(std::fabs(t) <= 1.0)) throw DomainError("gegenbauer: |t| must not exceed 1");
}
}  // namespace detail

/// C_m^d(t) by the three-term recurrence.
inline double gegenbauer_c(long m, double d, double t) {
  detail::check_gegenbauer_args(d, t);
  if (m < 0) throw DomainError("gegenbauer: degree must be nonnegative");
  if (m == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * d * t;
  for (long k = 2; k <= m; ++k) {
    const double kk = static_cast<double>(k);
    const double next = (2.0 * t * (kk + d - 1.0) * cur - (kk + 2.0 * d - 2.0) * prev) / kk;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// C_0^d(t), ..., C_{max_m}^d(t) in one pass of the recurrence.
inline std::vector<double> gegenbauer_sequence(long max_m, double d, double t) {
  detail::check_gegenbauer_args(d, t);
  if (max_m < 0) throw DomainError("gegenbauer: degree must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(max_m) + 1);
  out[0] = 1.0;
  if (max_m >= 1) out[1] = 2.0 * d * t;
  for (long k = 2; k <= max_m; ++k) {
    const double kk = static_cast<double>(k);
    out[k] = (2.0 * t * (kk + d - 1.0) * out[k - 1] - (kk + 2.0 * d - 2.0) * out[k - 2]) / kk;
  }
  return out;
}

/// ln C_m^d(1) = ln Gamma(m+2d) - ln Gamma(m+1) - ln Gamma(2d).
inline double log_gegenbauer_at_one(long m, double d) {
  return log_gamma(static_cast<double>(m) + 2.0 * d) - log_gamma(static_cast<double>(m) + 1.0) -
         log_gamma(2.0 * d);
}

namespace detail {

// Ascending series sum_k (-(x/2)^2)^k / (k! (nu+1)_k) in double-double times
// (x/2)^nu / Gamma(nu+1).
inline EstimatedValue bessel_j_series(double nu, double x) {
  const double half = 0.5 * x;
  const DoubleDouble q = DoubleDouble::two_prod(half, half);
  double log_prefactor = nu * std::log(half) - log_gamma(nu + 1.0);
  DoubleDouble term(1.0);
  DoubleDouble sum(1.0);
  double abs_sum = 1.0;
  for (int k = 1; k < 100000; ++k) {
    const DoubleDouble divisor = DoubleDouble::two_sum(nu, static_cast<double>(k)) * static_cast<double>(k);
    term = (term * (-q)) / divisor;
    sum += term;
    const double at = std::fabs(term.hi);
    abs_sum += at;
    if (abs_sum > 1e200) {
      term = term * 1e-200;
      sum = sum * 1e-200;
      abs_sum *= 1e-200;
      log_prefactor += 200.0 * std::numbers::ln10;
    }
    if (k > half && at < 1e-34 * std::fabs(sum.hi)) break;
  }
  const double s = sum.to_double();
  const double value = (s == 0.0) ? 0.0 : std::copysign(std::exp(log_prefactor + std::log(std::fabs(s))), s);
  // The prefactor carries a relative error proportional to the size of its logarithm.
  const double rel = kEps * (16.0 + std::fabs(nu * std::log(half)) + std::fabs(log_gamma(nu + 1.0)));
  const double cancellation = std::exp(log_prefactor) * abs_sum * 1e-30;
  return {value, std::fabs(value) * rel + cancellation};
}

}  // namespace detail

/// Quadrature of the real-order integral representation
///   J_nu(x) = (1/pi) int_0^pi cos(nu t - x sin t) dt
///             - (sin(nu pi)/pi) int_0^inf exp(-nu t - x sinh t) dt
/// for a fixed argument x and any order in [0, max_order].
///
/// The x-dependent part of the first integrand is tabulated once, so a plan
/// amortizes over the many orders needed by a spectral series.
class BesselQuadraturePlan {
 public:
  static constexpr int kNodes = 16;
  static constexpr double kPanelPhase = 4.0;

  BesselQuadraturePlan(double x, double max_order) : x_(x), max_order_(max_order) {
    if (!std::isfinite(x) || !(x > 0.0) || !std::isfinite(max_order) || max_order < 0.0) {
      throw DomainError("BesselQuadraturePlan: x must be positive and order nonnegative");
    }
    const auto& rule = detail::GaussLegendre::get(kNodes);
    const double span = max_order + x;
    panels_ = std::max(1, static_cast<int>(std::ceil(span * std::numbers::pi / kPanelPhase)));
    width_ = std::numbers::pi / panels_;
    offsets_.resize(kNodes);
    for (int i = 0; i < kNodes; ++i) offsets_[i] = 0.5 * width_ * (rule.nodes[i] + 1.0);
    const std::size_t total = static_cast<std::size_t>(panels_) * kNodes;
    wre_.resize(total);
    wim_.resize(total);
    for (int j = 0; j < panels_; ++j) {
      for (int i = 0; i < kNodes; ++i) {
        const double theta = j * width_ + offsets_[i];
        const double w = 0.5 * width_ * rule.weights[i];
        const double phase = x * std::sin(theta);
        wre_[j * kNodes + i] = w * std::cos(phase);
        wim_[j * kNodes + i] = -w * std::sin(phase);
      }
    }
  }

  double x() const noexcept { return x_; }
  double max_order() const noexcept { return max_order_; }

  EstimatedValue evaluate(double nu) const {
    if (!(nu >= 0.0) || nu > max_order_ * (1.0 + 1e-12) + 1e-12) {
      throw DomainError("BesselQuadraturePlan: order outside the planned range");
    }
    std::array<double, kNodes> tre{};
    std::array<double, kNodes> tim{};
    for (int i = 0; i < kNodes; ++i) {
      tre[i] = std::cos(nu * offsets_[i]);
      tim[i] = std::sin(nu * offsets_[i]);
    }
    CompensatedSum acc;
    constexpr int kResync = 16;
    const std::complex<double> step(std::cos(nu * width_), std::sin(nu * width_));
    std::complex<double> rot(1.0, 0.0);
    for (int j = 0; j < panels_; ++j) {
      if (j % kResync == 0) {
        const double a = nu * (j * width_);
        rot = {std::cos(a), std::sin(a)};
      }
      const double* wr = &wre_[static_cast<std::size_t>(j) * kNodes];
      const double* wi = &wim_[static_cast<std::size_t>(j) * kNodes];
      double sr = 0.0;
      double si = 0.0;
      for (int i = 0; i < kNodes; ++i) {
        sr += tre[i] * wr[i] - tim[i] * wi[i];
        si += tre[i] * wi[i] + tim[i] * wr[i];
      }
      acc.add(rot.real() * sr - rot.imag() * si);
      rot *= step;
    }
    double value = acc.value() / std::numbers::pi;
    const double s = detail::sin_pi(nu);
    if (s != 0.0) value -= s / std::numbers::pi * tail_integral(nu);
    const double error = detail::kEps * (32.0 + 2.0 * std::sqrt(nu + x_));
    return {value, error};
  }

 private:
  // int_0^inf exp(-nu t - x sinh t) dt on geometrically growing panels.
  double tail_integral(double nu) const {
    const auto& rule = detail::GaussLegendre::get(10);
    const double scale = 1.0 / (nu + x_);
    CompensatedSum acc;
    double a = 0.0;
    double b = scale;
    for (int panel = 0; panel < 80; ++panel) {
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (b + a);
      double s = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = mid + half * rule.nodes[i];
        s += rule.weights[i] * std::exp(-nu * t - x_ * std::sinh(t));
      }
      acc.add(half * s);
      if (nu * b + x_ * std::sinh(b) > 60.0) break;
      a = b;
      b *= 2.0;
    }
    return acc.value();
  }

  double x_;
  double max_order_;
  int panels_ = 0;
  double width_ = 0.0;
  std::vector<double> offsets_;
  std::vector<double> wre_;
  std::vector<double> wim_;
};

namespace detail {
inline bool bessel_use_series(double nu, double x) { return x <= std::max(12.0, 0.5 * nu); }
}  // namespace detail

/// J_nu(x) with an error estimate, never throwing on accuracy.
inline EstimatedValue bessel_j_estimate(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x)) throw DomainError("bessel_j: non-finite input");
  if (nu < 0.0 || x < 0.0) throw DomainError("bessel_j: order and argument must be nonnegative");
  if (x == 0.0) return {nu == 0.0 ? 1.0 : 0.0, 0.0};
  if (detail::bessel_use_series(nu, x)) return detail::bessel_j_series(nu, x);
  return BesselQuadraturePlan(x, nu).evaluate(nu);
}

/// J_nu(x) for real nu >= 0 and x >= 0.
inline double bessel_j(double nu, double x, const Tolerance& tol = {}) {
  const EstimatedValue r = bessel_j_estimate(nu, x);
  if (r.error > tol.allowed(r.value)) {
    throw PrecisionError("bessel_j: requested tolerance unreachable in double precision (achieved " +
                             std::to_string(r.error) + ")",
                         r.error);
  }
  return r.value;
}

}  // namespace conekernel
