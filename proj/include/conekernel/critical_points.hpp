#pragma once

// Stationary points of the oscillatory sums: the sets C_{sigma,rho}(phi, q) of
// mu in [0, 1] solving
//
//   -(sigma1/rho) acos(mu) + (sigma2 phi - pi/(2 rho)) + 2 pi q = 0,
//
// and the interior frequency sets D_{rho,sigma1}(phi0) at phi0 in {0, pi}.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conekernel/errors.hpp"
#include "conekernel/specfun.hpp"

namespace conekernel {

/// The two angles at which the frequency sets are defined.
enum class ConjugateAngle { Zero, Pi };

inline double angle_value(ConjugateAngle a) noexcept { return a == ConjugateAngle::Zero ? 0.0 : std::numbers::pi; }

inline std::string to_string(ConjugateAngle a) { return a == ConjugateAngle::Zero ? "0" : "pi"; }

/// Branch (sigma1, sigma2) of the phase and winding index q.
struct BranchLabel {
  int sigma1 = 1;
  int sigma2 = 1;
  long q = 0;

  BranchLabel() = default;
  BranchLabel(int s1, int s2, long q_) : sigma1(s1), sigma2(s2), q(q_) {
    if ((s1 != 1 && s1 != -1) || (s2 != 1 && s2 != -1)) {
      throw DomainError("BranchLabel: signs must be +1 or -1");
    }
  }

  bool operator==(const BranchLabel&) const = default;
};

/// A critical value mu0 with its branch and the oscillation frequency sqrt(1 - mu0^2).
///
/// `boundary` marks solutions whose angle acos(mu0) lies within the membership
/// slack of 0 or pi/2; their mu0 is snapped to exactly 1 or 0.
struct CriticalDatum {
  double mu0 = 0.0;
  BranchLabel branch;
  double frequency = 1.0;
  bool boundary = false;
};

/// Absolute slack for deciding acos(mu) in [0, pi/2].
inline constexpr double kMembershipSlack = 1e-13;

/// Enumeration bound: every nonempty C_{sigma,rho}(phi, q) has |q| <= Q.
inline long q_bound(double rho) {
  if (!(rho > 0.0)) throw DomainError("q_bound: rho must be positive");
  return static_cast<long>(std::floor(1.0 / (2.0 * rho) + 0.5)) + 1;
}

/// Residual of the defining equation of C at mu.
inline double critical_residual(double rho, const BranchLabel& b, double phi, double mu) {
  return -(b.sigma1 / rho) * arccos_unit(mu) + (b.sigma2 * phi - std::numbers::pi / (2.0 * rho)) +
         2.0 * std::numbers::pi * static_cast<double>(b.q);
}

namespace detail {

inline void check_rho_phi(double rho, double phi) {
  if (!std::isfinite(rho) || !(rho > 0.0)) throw DomainError("critical points: rho must be positive");
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) throw DomainError("critical points: phi must lie in [0, pi]");
}

// Solution for a given target angle acos(mu) = theta, if theta lies in [0, pi/2].
inline std::optional<CriticalDatum> datum_from_angle(double theta, const BranchLabel& b) {
  constexpr double kQuarter = 0.5 * std::numbers::pi;
  if (theta < -kMembershipSlack || theta > kQuarter + kMembershipSlack) return std::nullopt;
  CriticalDatum out;
  out.branch = b;
  if (std::fabs(theta) <= kMembershipSlack) {
    out.mu0 = 1.0;
    out.frequency = 0.0;
    out.boundary = true;
  } else if (std::fabs(theta - kQuarter) <= kMembershipSlack) {
    out.mu0 = 0.0;
    out.frequency = 1.0;
    out.boundary = true;
  } else {
    out.mu0 = std::cos(theta);
    out.frequency = std::sin(theta);
  }
  return out;
}

}  // namespace detail

/// C_{sigma,rho}(phi, q) for one branch label: empty or a single value.
inline std::vector<CriticalDatum> critical_set(double rho, const BranchLabel& b, double phi) {
  detail::check_rho_phi(rho, phi);
  const double theta = b.sigma1 * (b.sigma2 * rho * phi - 0.5 * std::numbers::pi +
                                   2.0 * std::numbers::pi * rho * static_cast<double>(b.q));
  std::vector<CriticalDatum> out;
  if (auto d = detail::datum_from_angle(theta, b)) out.push_back(*d);
  return out;
}

/// C_{sigma,rho}(phi) = union over q, enumerated for |q| <= Q.
inline std::vector<CriticalDatum> critical_union(double rho, int sigma1, int sigma2, double phi) {
  std::vector<CriticalDatum> out;
  const long qmax = q_bound(rho);
  for (long q = -qmax; q <= qmax; ++q) {
    for (const auto& d : critical_set(rho, BranchLabel(sigma1, sigma2, q), phi)) out.push_back(d);
  }
  return out;
}

/// D_{rho,sigma1}(phi0): mu in the open interval (0, 1) with
/// acos(mu) = sigma1 (pi/2 + rho phi0 + 2 pi rho q) for some q.
///
/// Members are reported with sigma2 = +1 and the q of the defining equation.
inline std::vector<CriticalDatum> conjugate_frequencies(double rho, int sigma1, ConjugateAngle phi0) {
  if (!std::isfinite(rho) || !(rho > 0.0)) throw DomainError("conjugate_frequencies: rho must be positive");
  if (sigma1 != 1 && sigma1 != -1) throw DomainError("conjugate_frequencies: sigma1 must be +1 or -1");
  const double phi = angle_value(phi0);
  std::vector<CriticalDatum> out;
  const long qmax = q_bound(rho);
  for (long q = -qmax; q <= qmax; ++q) {
    const double theta = sigma1 * (0.5 * std::numbers::pi + rho * phi + 2.0 * std::numbers::pi * rho * q);
    const auto d = detail::datum_from_angle(theta, BranchLabel(sigma1, 1, q));
    if (d && !d->boundary) out.push_back(*d);
  }
  return out;
}

/// Whether 1/rho lies within `slack` of an even positive integer.
inline bool inverse_in_even_naturals(double rho, double slack = 1e-9) {
  const double inv = 1.0 / rho;
  const double k = std::round(inv / 2.0);
  return k >= 1.0 && std::fabs(inv - 2.0 * k) <= slack;
}

/// One cell of a classification table.
struct ClassificationCell {
  double phi;
  BranchLabel branch;
  std::vector<CriticalDatum> members;
};

/// Summary flags and per-angle enumeration of the critical sets at one rho.
struct Classification {
  double rho;
  long q_bound;
  bool rho_at_least_one;
  bool rho_above_half;
  bool inverse_in_2n;
  std::vector<double> angles;  // 0, pi/4, pi/2, 3pi/4, pi
  std::vector<ClassificationCell> cells;

  /// Members of C_{(s1,s2),rho}(phi, q) in the table (phi must be a table angle).
  const std::vector<CriticalDatum>& lookup(double phi, int s1, int s2, long q) const {
    for (const auto& c : cells) {
      if (c.phi == phi && c.branch == BranchLabel(s1, s2, q)) return c.members;
    }
    throw InputError("Classification::lookup: cell not in table");
  }

  /// True when some table angle in the open interval (0, pi) has a nonempty cell with q != 0.
  bool interior_nonzero_winding_nonempty(double phi_hi = std::numbers::pi) const {
    for (const auto& c : cells) {
      if (c.phi > 0.0 && c.phi < phi_hi && c.branch.q != 0 && !c.members.empty()) return true;
    }
    return false;
  }

  /// True when mu = 1 occurs in some cell at phi in {0, pi}.
  bool endpoint_one_present() const {
    for (const auto& c : cells) {
      if (c.phi != 0.0 && c.phi != std::numbers::pi) continue;
      for (const auto& m : c.members) {
        if (m.mu0 == 1.0) return true;
      }
    }
    return false;
  }
};

inline Classification classify(double rho) {
  if (!std::isfinite(rho) || !(rho > 0.0)) throw DomainError("classify: rho must be positive");
  Classification out{rho,
                     q_bound(rho),
                     rho >= 1.0,
                     rho > 0.5,
                     inverse_in_even_naturals(rho),
                     {0.0, 0.25 * std::numbers::pi, 0.5 * std::numbers::pi, 0.75 * std::numbers::pi, std::numbers::pi},
                     {}};
  for (double phi : out.angles) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        for (long q = -out.q_bound; q <= out.q_bound; ++q) {
          const BranchLabel b(s1, s2, q);
          out.cells.push_back({phi, b, critical_set(rho, b, phi)});
        }
      }
    }
  }
  return out;
}

inline void to_json(nlohmann::json& j, const CriticalDatum& d) {
  j = nlohmann::json{{"mu0", d.mu0},
                     {"sigma1", d.branch.sigma1},
                     {"sigma2", d.branch.sigma2},
                     {"q", d.branch.q},
                     {"frequency", d.frequency}};
  if (d.boundary) j["boundary"] = true;
}

}  // namespace conekernel
