// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "conekernel/asymptotics.hpp"
#include "conekernel/critical_points.hpp"
#include "conekernel/harness.hpp"
#include "conekernel/kernel_series.hpp"
#include "conekernel/specfun.hpp"

using namespace conekernel;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double envelope_slope(const ScanTable& t, double phi) {
  return fit_decay_exponent(upper_envelope(modulus_samples(t, phi))).slope;
}

FrequencyResult frequency_at(const ConeParams& p, double phi, double growth) {
  const auto xs = uniform_grid(200.0, 0.2, 512);
  const ScanTable t = scan(p, xs, {phi}, {kTol, false, 1});
  std::vector<ComplexValue> v;
  for (const auto& r : t.rows) v.push_back(r.value);
  return dominant_frequency(xs, v, growth);
}

// 1. |I| = 1/(d 2^d Gamma(d)) at rho = 1, c = 0.
Outcome euclidean_identity() {
  double worst = 0.0;
  const auto xs = log_grid_per_decade(0.1, 200.0, 24);
  const std::vector<double> phis{0.0, 0.3, 0.5 * kPi, 2.8, kPi};
  for (int n : {3, 4, 5}) {
    const ConeParams p(1.0, n, 0.0);
    const double expect = 1.0 / (p.d() * std::pow(2.0, p.d()) * std::tgamma(p.d()));
    for (const auto& r : scan(p, xs, phis, {1e-12, false, 1}).rows) {
      worst = std::max(worst, r.ok() ? std::fabs(r.modulus - expect) : INFINITY);
    }
    // Brute-force partial sums at twice the truncation index, a few spot points.
    for (double x : {0.1, 10.0, 200.0}) {
      const SeriesEvaluator ev(p, x, 1e-12);
      const SeriesEvaluator brute = SeriesEvaluator::with_terms(p, x, 2 * ev.max_degree() + 2);
      for (double phi : phis) worst = std::max(worst, std::fabs(std::abs(brute.at(phi).value) - expect));
    }
  }
  return {worst <= 1e-8, fmt("max |modulus - identity| = %.3g (limit 1e-8)", worst)};
}

// 2. Small-x exponent nu0 - d for n = 3, rho = 1, c = 2.
Outcome smallx_exponent() {
  const ConeParams p(1.0, 3, 2.0);
  const auto xs = log_grid_per_decade(1e-4, 1e-2, 24);
  std::vector<Sample> s;
  std::vector<double> scaled;
  for (const auto& r : scan(p, xs, {0.0, 0.5 * kPi, kPi}, {1e-14, false, 1}).rows) {
    s.emplace_back(r.x, r.modulus);
    scaled.push_back(r.modulus * std::pow(r.x, -p.small_x_exponent()));
  }
  // One fit per angle; the worst deviation decides.
  double slope = 0.0, worst = 0.0;
  const std::size_t per = xs.size();
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<Sample> at(s.begin() + static_cast<long>(a * per), s.begin() + static_cast<long>((a + 1) * per));
    const double fitted = fit_decay_exponent(at).slope;
    if (std::fabs(fitted - 1.0) >= worst) {
      worst = std::fabs(fitted - 1.0);
      slope = fitted;
    }
  }
  std::vector<double> sorted = scaled;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double lo = sorted.front() / median;
  const double hi = sorted.back() / median;
  const bool pass = worst <= 0.05 && lo >= 0.2 && hi <= 5.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "slope %.4f (1.0 +- 0.05); |I| x^-(nu0-d) / median in [%.3f, %.3f] (bracket [0.2, 5])",
                slope, lo, hi);
  return {pass, buf};
}

// 3 and 4. Growth x^d at a conjugate angle, with the predicted frequency.
Outcome conjugate_growth(double rho, double phi, bool bounded_check) {
  const ConeParams p(rho, 3, 0.0);
  const auto xs = log_grid_per_decade(100.0, 2000.0, 96);
  std::vector<double> phis{phi};
  if (bounded_check) phis = {0.0, kPi};
  const ScanTable t = scan(p, xs, phis, {kTol, false, 1});
  const double slope = envelope_slope(t, phi);
  const FrequencyResult f = frequency_at(p, phi, p.d());
  bool pass = std::fabs(slope - 0.5) <= 0.1 && f.oscillation && std::fabs(f.frequency - 0.5) <= 0.02 * 0.5;
  char buf[200];
  std::snprintf(buf, sizeof buf, "slope %.4f (0.5 +- 0.1); frequency %.5f (0.5 +- 2%%)", slope, f.frequency);
  std::string detail = buf;
  if (bounded_check) {
    const double s0 = envelope_slope(t, 0.0);
    pass = pass && s0 <= 0.05;
    detail += fmt("; slope at phi=0 %.4f (<= 0.05)", s0);
  }
  return {pass, detail};
}

// 5. Boundedness for rho >= 1.
Outcome large_rho_bounded() {
  const auto xs = log_grid_per_decade(1.0, 2000.0, 96);
  const std::vector<double> phis{0.0, 0.25 * kPi, 0.5 * kPi, 0.75 * kPi, kPi};
  double worst_ratio = 0.0, worst_slope = -INFINITY;
  for (double rho : {1.0, 1.5}) {
    const ScanTable t = scan(ConeParams(rho, 3, 0.0), xs, phis, {kTol, false, 1});
    for (double phi : phis) {
      const auto rows = rows_at(t, phi);
      double sup = 0.0;
      for (const auto* r : rows) sup = r->ok() ? std::max(sup, r->modulus) : INFINITY;
      worst_ratio = std::max(worst_ratio, sup / rows.front()->modulus);
      worst_slope = std::max(worst_slope, envelope_slope(t, phi));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max sup/|I(1)| %.3f (<= 10); max slope %.4f (<= 0.05)", worst_ratio, worst_slope);
  return {worst_ratio <= 10.0 && worst_slope <= 0.05, buf};
}

// 6. Interior-angle boundedness at rho = 1/3.
double interior_worst_slope(double eps0) {
  const std::vector<double> phis{eps0, 0.5 * kPi, kPi - eps0};
  const ScanTable t = scan(ConeParams(1.0 / 3.0, 3, 0.0), log_grid_per_decade(50.0, 2000.0, 96), phis, {kTol, false, 1});
  double worst = -INFINITY;
  for (double phi : phis) worst = std::max(worst, envelope_slope(t, phi));
  return worst;
}

Outcome interior_bounded() {
  const double s = interior_worst_slope(0.4);
  std::string detail = fmt("max slope %.4f (<= 0.05)", s);
  detail += fmt("; eps0=0.2: %.4f", interior_worst_slope(0.2));
  detail += fmt(", eps0=0.6: %.4f (reported only)", interior_worst_slope(0.6));
  return {s <= 0.05, detail};
}

// 7. Residual of the principal term.
Outcome principal_residual() {
  const ConeParams p(1.0 / 3.0, 3, 0.0);
  const ScanTable t = scan(p, log_grid_per_decade(200.0, 2000.0, 96), {0.0}, {kTol, true, 1});
  std::vector<Sample> res;
  for (const auto& r : t.rows) res.emplace_back(r.x, std::abs(r.value - *r.prediction));
  const double slope = fit_decay_exponent(upper_envelope(res)).slope;
  char buf[200];
  std::snprintf(buf, sizeof buf, "residual slope %.4f (<= d - 0.2 = 0.3); pairing %s (rss %.3g vs %.3g)", slope,
                to_string(t.pairing->pairing).c_str(), t.pairing->residual_algebraic, t.pairing->residual_literal);
  return {slope <= 0.3, buf};
}

// 8. Classification tables against the enumerated facts.
Outcome classification_tables() {
  int mismatches = 0;
  double worst_residual = 0.0;
  auto only_zero = [](const std::vector<CriticalDatum>& v) { return v.size() == 1 && v[0].mu0 == 0.0; };
  for (double rho : {2.0, 1.0, 0.7, 0.6, 1.0 / 3.0, 2.0 / 3.0}) {
    const Classification c = classify(rho);
    for (const auto& cell : c.cells) {
      for (const auto& m : cell.members) {
        worst_residual = std::max(worst_residual, std::fabs(critical_residual(rho, cell.branch, cell.phi, m.mu0)));
      }
      const auto& b = cell.branch;
      const bool interior = cell.phi > 0.0 && cell.phi < kPi;
      if (rho >= 1.0 && interior && b.q != 0 && !cell.members.empty()) ++mismatches;
      if (rho > 0.5 && cell.phi > 0.0 && cell.phi < 0.5 * kPi && b.q != 0 && !cell.members.empty()) ++mismatches;
      if (rho > 0.5 && cell.phi == 0.0) {
        const bool listed = b.sigma1 == -1 && b.q == 0;
        if (listed != only_zero(cell.members) || (!listed && !cell.members.empty())) ++mismatches;
      }
      if (rho > 1.0 && cell.phi == kPi && !cell.members.empty()) ++mismatches;
      if (rho == 1.0 && cell.phi == kPi) {
        const bool listed = (b.sigma1 == 1 && b.sigma2 == 1 && b.q == 0) || (b.sigma1 == 1 && b.sigma2 == -1 && b.q == 1);
        if (listed != only_zero(cell.members) || (!listed && !cell.members.empty())) ++mismatches;
      }
    }
    if (!inverse_in_even_naturals(rho) && c.endpoint_one_present()) ++mismatches;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d table mismatches; max residual %.3g (<= 1e-12)", mismatches, worst_residual);
  return {mismatches == 0 && worst_residual <= 1e-12, buf};
}

// 9. Special-function suite.
Outcome special_functions() {
  double recurrence = 0.0, half = 0.0, endpoint = 0.0;
  // J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu
  for (double nu : {1.3, 4.0, 10.7, 40.2, 150.5}) {
    for (double x : {0.3, 2.0, 9.5, 31.0, 120.0, 400.0}) {
      const double lhs = bessel_j(nu - 1.0, x) + bessel_j(nu + 1.0, x);
      recurrence = std::max(recurrence, std::fabs(lhs - 2.0 * nu / x * bessel_j(nu, x)));
    }
  }
  for (double x : {0.1, 1.0, 7.0, 33.0, 150.0}) {
    const double s = std::sqrt(2.0 / (kPi * x));
    half = std::max(half, std::fabs(bessel_j(0.5, x) - s * std::sin(x)));
    half = std::max(half, std::fabs(bessel_j(2.5, x) - s * ((3.0 / (x * x) - 1.0) * std::sin(x) - 3.0 * std::cos(x) / x)));
    half = std::max(half, std::fabs(bessel_j(1.5, x) - s * (std::sin(x) / x - std::cos(x))));
  }
  for (double d : {0.5, 1.0, 1.5}) {
    for (long m = 0; m <= 2000; ++m) {
      const double exact = std::exp(std::lgamma(m + 2.0 * d) - std::lgamma(2.0 * d) - std::lgamma(m + 1.0));
      endpoint = std::max(endpoint, std::fabs(gegenbauer_c(m, d, 1.0) - exact) / exact);
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "recurrence %.3g (<= 1e-9); half-integer %.3g (<= 1e-10); endpoint rel %.3g (<= 1e-10)",
                recurrence, half, endpoint);
  return {recurrence <= 1e-9 && half <= 1e-10 && endpoint <= 1e-10, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 euclidean identity", euclidean_identity},
      {"2 small-x exponent", smallx_exponent},
      {"3 diagonal growth rho=1/3 phi=0", [] { return conjugate_growth(1.0 / 3.0, 0.0, false); }},
      {"4 antipodal growth rho=2/3 phi=pi", [] { return conjugate_growth(2.0 / 3.0, kPi, true); }},
      {"5 boundedness rho>=1", large_rho_bounded},
      {"6 interior-angle boundedness rho=1/3", interior_bounded},
      {"7 principal-term residual", principal_residual},
      {"8 critical-set tables", classification_tables},
      {"9 special functions", special_functions},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
