#pragma once

// Scans over (x, phi) grids, power-law fitting, frequency extraction and
// bound checks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include "conekernel/asymptotics.hpp"
#include "conekernel/critical_points.hpp"
#include "conekernel/errors.hpp"
#include "conekernel/kernel_series.hpp"
#include "conekernel/spectrum.hpp"

namespace conekernel {

// ---------------------------------------------------------------------------
// Grids

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 1) throw InputError("linear_grid: need at least one point");
  if (!(hi >= lo)) throw InputError("linear_grid: hi must be >= lo");
  if (points == 1) return {lo};
  std::vector<double> out(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) out[k] = lo + step * static_cast<double>(k);
  out.back() = hi;
  return out;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0)) throw InputError("log_grid: lo must be positive");
  std::vector<double> out = linear_grid(std::log(lo), std::log(hi), points);
  for (double& v : out) v = std::exp(v);
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// Log-spaced grid with `per_decade` points per decade, endpoints included.
inline std::vector<double> log_grid_per_decade(double lo, double hi, double per_decade) {
  if (!(lo > 0.0) || !(hi > lo)) throw InputError("log_grid_per_decade: need 0 < lo < hi");
  const auto points = static_cast<std::size_t>(std::ceil(per_decade * std::log10(hi / lo))) + 1;
  return log_grid(lo, hi, points);
}

/// x0, x0 + step, ..., count values.
inline std::vector<double> uniform_grid(double x0, double step, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = x0 + step * static_cast<double>(k);
  return out;
}

// ---------------------------------------------------------------------------
// Power-law fits

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> x_range{0.0, 0.0};
};

using Sample = std::pair<double, double>;  // (x, magnitude)

/// Least squares of log(magnitude) on log(x).
inline FitResult fit_decay_exponent(const std::vector<Sample>& samples) {
  if (samples.size() < 8) throw InputError("fit_decay_exponent: need at least 8 samples");
  std::vector<double> lx, ly;
  lx.reserve(samples.size());
  ly.reserve(samples.size());
  double xmin = samples.front().first;
  double xmax = xmin;
  for (const auto& [x, m] : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InputError("fit_decay_exponent: x must be positive");
    if (!(m > 0.0) || !std::isfinite(m)) throw InputError("fit_decay_exponent: magnitudes must be positive");
    lx.push_back(std::log(x));
    ly.push_back(std::log(m));
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  std::vector<double> sorted = lx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("fit_decay_exponent: x values must be distinct");
  }
  const auto n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double dx = lx[k] - mx;
    const double dy = ly[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  FitResult out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double r = ly[k] - (out.intercept + out.slope * lx[k]);
    ss_res += r * r;
  }
  out.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  out.x_range = {xmin, xmax};
  return out;
}

/// Maximum of the magnitude within each logarithmic bin of width
/// 1/bins_per_octave octaves, anchored at the smallest x. Each maximum keeps
/// the x where it occurs.
inline std::vector<Sample> upper_envelope(std::vector<Sample> samples, double bins_per_octave = 4.0) {
  if (samples.empty()) return {};
  if (!(bins_per_octave > 0.0)) throw InputError("upper_envelope: bins_per_octave must be positive");
  std::sort(samples.begin(), samples.end());
  const double x0 = samples.front().first;
  std::vector<Sample> out;
  long current = -1;
  for (const auto& s : samples) {
    const auto bin = static_cast<long>(std::floor(bins_per_octave * std::log2(s.first / x0) + 1e-12));
    if (bin != current) {
      out.push_back(s);
      current = bin;
    } else if (s.second > out.back().second) {
      out.back() = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frequency extraction

struct FrequencyResult {
  bool oscillation = false;
  /// Absolute angular frequency (radians per unit x) of the largest peak.
  double frequency = 0.0;
  /// Same, with the sign of the dominant complex exponential e^{i w x}.
  double signed_frequency = 0.0;
  /// Peak height over the median spectral magnitude.
  double peak_to_median = 0.0;
};

inline constexpr double kPeakToMedianThreshold = 3.0;

/// Largest spectral peak of v(x) / x^growth on a uniform grid.
///
/// The detrended samples have their mean removed and are Hann-windowed and
/// zero-padded to at least 8x their length; the peak bin is refined by a
/// parabola through the neighbouring magnitudes.
inline FrequencyResult dominant_frequency(const std::vector<double>& xs, const std::vector<ComplexValue>& values,
                                          double expected_growth) {
  const std::size_t n = xs.size();
  if (values.size() != n) throw InputError("dominant_frequency: x and value counts differ");
  if (n < 256) throw InputError("dominant_frequency: need at least 256 samples");
  const double step = (xs.back() - xs.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) throw InputError("dominant_frequency: grid must be increasing");
  for (std::size_t k = 1; k < n; ++k) {
    if (std::fabs((xs[k] - xs[k - 1]) - step) > 1e-6 * step) throw InputError("dominant_frequency: grid not uniform");
  }

  std::vector<ComplexValue> y(n);
  ComplexValue mean{0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    if (expected_growth != 0.0 && !(xs[k] > 0.0)) {
      throw InputError("dominant_frequency: detrending needs positive x");
    }
    y[k] = expected_growth == 0.0 ? values[k] : values[k] * std::pow(xs[k], -expected_growth);
    mean += y[k];
  }
  mean /= static_cast<double>(n);

  std::size_t padded = 1;
  while (padded < 8 * n) padded <<= 1;
  const std::size_t pad = padded / n;  // bins of the padded transform per natural bin (at least 8)

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * padded));
  if (buf == nullptr) throw CapacityError("dominant_frequency: allocation failed");
  for (std::size_t k = 0; k < padded; ++k) {
    if (k < n) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
      const ComplexValue v = (y[k] - mean) * w;
      buf[k][0] = v.real();
      buf[k][1] = v.imag();
    } else {
      buf[k][0] = 0.0;
      buf[k][1] = 0.0;
    }
  }
  std::vector<double> mag(padded);
  {
    // Planner calls are not thread-safe in FFTW; keep plan creation serialized.
    static std::mutex planner;
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(planner);
      plan = fftw_plan_dft_1d(static_cast<int>(padded), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < padded; ++k) mag[k] = std::hypot(buf[k][0], buf[k][1]);
    std::lock_guard<std::mutex> lock(planner);
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);

  std::size_t peak = 1;
  for (std::size_t k = 1; k < padded; ++k) {
    if (mag[k] > mag[peak]) peak = k;
  }
  std::vector<double> coarse;
  coarse.reserve(n);
  for (std::size_t k = 0; k < padded; k += pad) coarse.push_back(mag[k]);
  std::nth_element(coarse.begin(), coarse.begin() + coarse.size() / 2, coarse.end());
  const double median = coarse[coarse.size() / 2];

  FrequencyResult out;
  out.peak_to_median = median > 0.0 ? mag[peak] / median : std::numeric_limits<double>::infinity();
  if (!(mag[peak] > kPeakToMedianThreshold * median)) return out;

  const double left = mag[(peak + padded - 1) % padded];
  const double right = mag[(peak + 1) % padded];
  const double denom = left - 2.0 * mag[peak] + right;
  const double delta = denom != 0.0 ? std::clamp(0.5 * (left - right) / denom, -0.5, 0.5) : 0.0;
  double bin = static_cast<double>(peak) + delta;
  if (bin > 0.5 * static_cast<double>(padded)) bin -= static_cast<double>(padded);
  out.oscillation = true;
  out.signed_frequency = 2.0 * std::numbers::pi * bin / (static_cast<double>(padded) * step);
  out.frequency = std::fabs(out.signed_frequency);
  return out;
}

// ---------------------------------------------------------------------------
// Scans

struct ScanRow {
  double x = 0.0;
  double phi = 0.0;
  ComplexValue value{0.0, 0.0};
  double modulus = 0.0;
  double envelope_interior = 0.0;
  double envelope_general = 0.0;
  std::optional<ComplexValue> prediction;
  long terms_used = 0;
  /// Nonempty when the evaluation of this row failed.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct PairingChoice {
  Pairing pairing = Pairing::Algebraic;
  double residual_literal = 0.0;    // root-sum-square over rows with a prediction
  double residual_algebraic = 0.0;
};

struct ScanTable {
  ConeParams params;
  std::vector<ScanRow> rows;
  std::optional<PairingChoice> pairing;
};

struct ScanOptions {
  double tol = 1e-10;
  bool with_prediction = false;
  unsigned workers = 1;
};

namespace detail {

inline void check_grid(const std::vector<double>& g, const char* name, double lo, double hi, bool open_lo) {
  if (g.empty()) throw InputError(std::string("scan: ") + name + " grid is empty");
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = g[k];
    const bool in_range = (open_lo ? v > lo : v >= lo) && v <= hi && std::isfinite(v);
    if (!in_range) throw InputError(std::string("scan: ") + name + " value out of range");
    if (k > 0 && !(g[k] > g[k - 1])) throw InputError(std::string("scan: ") + name + " grid must be strictly increasing");
  }
}

// Runs job(i) for i in [0, count) on `workers` threads.
template <class Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::optional<ConjugateAngle> conjugate_angle_of(double phi) {
  if (phi == 0.0) return ConjugateAngle::Zero;
  if (phi == std::numbers::pi) return ConjugateAngle::Pi;
  return std::nullopt;
}

}  // namespace detail

/// Evaluates I on x_grid x phi_grid. Rows come out sorted by (phi, x); the
/// Bessel coefficients at each x are shared by all angles.
inline ScanTable scan(const ConeParams& params, const std::vector<double>& x_grid, const std::vector<double>& phi_grid,
                      const ScanOptions& opts = {}) {
  detail::check_grid(x_grid, "x", 0.0, std::numeric_limits<double>::infinity(), true);
  detail::check_grid(phi_grid, "phi", 0.0, std::numbers::pi, false);
  if (!(opts.tol > 0.0)) throw InputError("scan: tol must be positive");

  std::vector<PrincipalTerm> literal, algebraic;
  if (opts.with_prediction) {
    for (double phi : phi_grid) {
      if (detail::conjugate_angle_of(phi)) {
        detail::check_optimality_regime(params.rho());
        break;
      }
    }
  }

  const std::size_t nx = x_grid.size();
  const std::size_t nphi = phi_grid.size();
  std::vector<ScanRow> rows(nx * nphi);
  detail::parallel_for(nx, opts.workers, [&](std::size_t ix) {
    const double x = x_grid[ix];
    const double env_i = series_envelope(params, x, Regime::Interior);
    const double env_g = series_envelope(params, x, Regime::General);
    std::optional<SeriesEvaluator> ev;
    std::string build_error;
    try {
      ev.emplace(params, x, opts.tol);
    } catch (const std::exception& e) {
      build_error = e.what();
    }
    for (std::size_t ip = 0; ip < nphi; ++ip) {
      ScanRow& row = rows[ip * nx + ix];
      row.x = x;
      row.phi = phi_grid[ip];
      row.envelope_interior = env_i;
      row.envelope_general = env_g;
      if (!ev) {
        row.error = build_error;
        row.modulus = std::numeric_limits<double>::quiet_NaN();
        row.value = {row.modulus, row.modulus};
        continue;
      }
      try {
        const SeriesResult r = ev->at(row.phi);
        row.value = r.value;
        row.modulus = std::abs(r.value);
        row.terms_used = r.terms_used;
      } catch (const std::exception& e) {
        row.error = e.what();
        row.modulus = std::numeric_limits<double>::quiet_NaN();
        row.value = {row.modulus, row.modulus};
      }
    }
  });

  ScanTable table{params, std::move(rows), std::nullopt};
  if (!opts.with_prediction) return table;

  // Predictions under both pairings; keep the one closer to the series.
  CompensatedSum res_lit, res_alg;
  std::vector<std::pair<std::size_t, ComplexValue>> pred_lit, pred_alg;
  bool any = false;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const ScanRow& row = table.rows[k];
    const auto angle = detail::conjugate_angle_of(row.phi);
    if (!angle || row.x < 1.0) continue;
    const ComplexValue pl = principal_prediction(params, *angle, row.x, Pairing::Literal);
    const ComplexValue pa = principal_prediction(params, *angle, row.x, Pairing::Algebraic);
    pred_lit.emplace_back(k, pl);
    pred_alg.emplace_back(k, pa);
    if (row.ok()) {
      res_lit.add(std::norm(row.value - pl));
      res_alg.add(std::norm(row.value - pa));
    }
    any = true;
  }
  if (!any) return table;
  PairingChoice choice;
  choice.residual_literal = std::sqrt(res_lit.value());
  choice.residual_algebraic = std::sqrt(res_alg.value());
  choice.pairing = choice.residual_literal < choice.residual_algebraic ? Pairing::Literal : Pairing::Algebraic;
  for (const auto& [k, v] : choice.pairing == Pairing::Literal ? pred_lit : pred_alg) table.rows[k].prediction = v;
  table.pairing = choice;
  return table;
}

/// Rows at one angle, in increasing x.
inline std::vector<const ScanRow*> rows_at(const ScanTable& t, double phi) {
  std::vector<const ScanRow*> out;
  for (const auto& r : t.rows) {
    if (r.phi == phi) out.push_back(&r);
  }
  return out;
}

/// (x, |I|) samples of the successful rows at one angle.
inline std::vector<Sample> modulus_samples(const ScanTable& t, double phi) {
  std::vector<Sample> out;
  for (const ScanRow* r : rows_at(t, phi)) {
    if (r->ok() && r->modulus > 0.0) out.emplace_back(r->x, r->modulus);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bound checks

enum class BoundKind { Interior, General, SmallX };

inline std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Interior: return "interior";
    case BoundKind::General: return "general";
    case BoundKind::SmallX: return "smallx";
  }
  return "?";
}

inline BoundKind bound_kind_from_string(const std::string& s) {
  if (s == "interior") return BoundKind::Interior;
  if (s == "general") return BoundKind::General;
  if (s == "smallx") return BoundKind::SmallX;
  throw InputError("unknown bound '" + s + "' (expected interior, general or smallx)");
}

inline constexpr double kDefaultBoundThreshold = 10.0;

struct BoundReport {
  BoundKind which = BoundKind::Interior;
  double sup_ratio = 0.0;
  double inf_ratio = 0.0;
  std::size_t argmax = 0;  // index into table.rows
  double argmax_x = 0.0;
  double argmax_phi = 0.0;
  bool pass = false;
  double threshold = kDefaultBoundThreshold;
  std::size_t failed_rows = 0;
};

/// sup over rows of |I| / envelope, with the envelope in series units.
/// Rows whose evaluation failed count against the check.
inline BoundReport verify_bound(const ScanTable& table, BoundKind which, double threshold = kDefaultBoundThreshold) {
  if (table.rows.empty()) throw InputError("verify_bound: empty table");
  BoundReport rep;
  rep.which = which;
  rep.threshold = threshold;
  rep.sup_ratio = -1.0;
  rep.inf_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const ScanRow& r = table.rows[k];
    if (!r.ok()) {
      ++rep.failed_rows;
      continue;
    }
    const double env = which == BoundKind::General ? r.envelope_general : r.envelope_interior;
    const double ratio = r.modulus / env;
    if (ratio > rep.sup_ratio) {
      rep.sup_ratio = ratio;
      rep.argmax = k;
    }
    rep.inf_ratio = std::min(rep.inf_ratio, ratio);
  }
  if (rep.failed_rows == table.rows.size()) {
    rep.sup_ratio = std::numeric_limits<double>::quiet_NaN();
    rep.inf_ratio = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.argmax_x = table.rows[rep.argmax].x;
  rep.argmax_phi = table.rows[rep.argmax].phi;
  rep.pass = rep.failed_rows == 0 && rep.sup_ratio <= threshold;
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kCsvHeader = "x,phi,re,im,modulus,env_interior,env_general,pred_re,pred_im";

inline void write_csv(std::ostream& os, const ScanTable& t) {
  os << kCsvHeader << '\n';
  for (const auto& r : t.rows) {
    os << format_g17(r.x) << ',' << format_g17(r.phi) << ',' << format_g17(r.value.real()) << ','
       << format_g17(r.value.imag()) << ',' << format_g17(r.modulus) << ',' << format_g17(r.envelope_interior) << ','
       << format_g17(r.envelope_general) << ',';
    if (r.prediction) os << format_g17(r.prediction->real()) << ',' << format_g17(r.prediction->imag());
    else os << ',';
    os << '\n';
  }
}

inline void to_json(nlohmann::json& j, const FitResult& f) {
  j = nlohmann::json{{"slope", f.slope},
                     {"intercept", f.intercept},
                     {"r_squared", f.r_squared},
                     {"x_range", {f.x_range.first, f.x_range.second}}};
}

inline void to_json(nlohmann::json& j, const FrequencyResult& f) {
  j = nlohmann::json{{"oscillation", f.oscillation}, {"peak_to_median", f.peak_to_median}};
  if (f.oscillation) {
    j["frequency"] = f.frequency;
    j["signed_frequency"] = f.signed_frequency;
  }
}

inline void to_json(nlohmann::json& j, const BoundReport& r) {
  j = nlohmann::json{{"bound", to_string(r.which)},
                     {"sup_ratio", r.sup_ratio},
                     {"inf_ratio", r.inf_ratio},
                     {"argmax", {{"row", r.argmax}, {"x", r.argmax_x}, {"phi", r.argmax_phi}}},
                     {"pass", r.pass},
                     {"threshold", r.threshold},
                     {"failed_rows", r.failed_rows}};
}

inline void to_json(nlohmann::json& j, const PairingChoice& c) {
  j = nlohmann::json{{"pairing", to_string(c.pairing)},
                     {"residual_literal", c.residual_literal},
                     {"residual_algebraic", c.residual_algebraic}};
}

}  // namespace conekernel
