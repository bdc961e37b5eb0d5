#pragma once

// Run configuration, presets and the command runners behind the
// `conekernel` executable. Flag parsing lives in tools/; everything here works
// on a RunConfig so it can be driven from tests as well.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conekernel/asymptotics.hpp"
#include "conekernel/critical_points.hpp"
#include "conekernel/errors.hpp"
#include "conekernel/harness.hpp"
#include "conekernel/kernel_series.hpp"
#include "conekernel/spectrum.hpp"

namespace conekernel {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kBoundFailed = 1;
inline constexpr int kInvalidInput = 2;
inline constexpr int kEvaluationFailed = 3;
inline constexpr int kIoFailure = 4;
inline constexpr int kUnsupportedRegime = 5;
}  // namespace exit_code

struct GridSpec {
  double min = 1.0;
  double max = 100.0;
  int points = 49;
  std::string scale = "log";  // "log" or "lin"

  std::vector<double> values() const {
    if (points < 1) throw InputError("grid: --x-points must be at least 1");
    if (!(min > 0.0) || !(max >= min)) throw InputError("grid: need 0 < x-min <= x-max");
    if (points > 1 && !(max > min)) throw InputError("grid: x-max must exceed x-min when x-points > 1");
    if (scale == "log") return log_grid(min, max, static_cast<std::size_t>(points));
    if (scale == "lin") return linear_grid(min, max, static_cast<std::size_t>(points));
    throw InputError("grid: --x-scale must be 'log' or 'lin'");
  }

  bool operator==(const GridSpec&) const = default;
};

struct EvalSpec {
  double x = 1.0;
  double phi = 0.0;
  bool physical = false;
  double t = 1.0;
  double r1 = 1.0;
  double r2 = 1.0;

  bool operator==(const EvalSpec&) const = default;
};

/// Uniform grid x0 + k step, k < points, for frequency extraction (points = 0 disables it).
struct FrequencySpec {
  double x0 = 200.0;
  double step = 0.2;
  int points = 0;
  std::optional<double> growth;

  bool operator==(const FrequencySpec&) const = default;
};

struct RunConfig {
  std::string command = "eval";
  std::string preset;
  ConeParams params{1.0, 3, 0.0};
  GridSpec x_grid;
  std::vector<double> phi_list{0.0};
  std::optional<ConjugateAngle> phi0;
  EvalSpec eval;
  FrequencySpec frequency;
  double tol = 1e-10;
  bool with_prediction = false;
  BoundKind bound = BoundKind::Interior;
  double threshold = kDefaultBoundThreshold;
  double eps0 = 0.4;
  double bins_per_octave = 4.0;
  std::string output_path = "-";
  unsigned workers = 1;

  bool operator==(const RunConfig&) const = default;

  /// Angles to scan: phi0 when set, otherwise the phi list.
  std::vector<double> angles() const {
    if (phi0) return {angle_value(*phi0)};
    return phi_list;
  }
};

// ---------------------------------------------------------------------------
// Angle literals

/// Parses "1.25", "pi", "pi/2", "3pi/4", "3*pi/4", "pi-0.4", "pi/2+0.1".
inline double parse_angle(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ') s.push_back(ch);
  }
  auto number = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size()) throw InputError("cannot parse angle '" + text + "'");
    return v;
  };
  const auto at = s.find("pi");
  if (at == std::string::npos) return number(s);

  std::string coef = s.substr(0, at);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double value = std::numbers::pi * (coef.empty() ? 1.0 : number(coef));
  std::string rest = s.substr(at + 2);
  if (!rest.empty() && rest.front() == '/') {
    std::size_t end = 1;
    while (end < rest.size() && rest[end] != '+' && rest[end] != '-') ++end;
    value /= number(rest.substr(1, end - 1));
    rest = rest.substr(end);
  }
  if (!rest.empty()) {
    if (rest.front() != '+' && rest.front() != '-') throw InputError("cannot parse angle '" + text + "'");
    value += number(rest);
  }
  return value;
}

inline std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_angle(item));
  if (out.empty()) throw InputError("empty angle list");
  return out;
}

/// Only the exact literals "0" and "pi".
inline ConjugateAngle parse_conjugate_angle(const std::string& text) {
  if (text == "0") return ConjugateAngle::Zero;
  if (text == "pi") return ConjugateAngle::Pi;
  throw InputError("--phi0 accepts only the literals 0 and pi (got '" + text + "')");
}

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"euclidean-n3", "smallx-attractive", "conjugate-growth",
                                              "diagonal-growth", "interior-bounded"};
  return names;
}

/// Interior angles {eps0, pi/2, pi - eps0}.
inline std::vector<double> interior_angles(double eps0) {
  if (!(eps0 > 0.0 && eps0 < 0.5 * std::numbers::pi)) throw InputError("eps0 must lie in (0, pi/2)");
  return {eps0, 0.5 * std::numbers::pi, std::numbers::pi - eps0};
}

/// Applies a named preset on top of `cfg` (command and output are kept).
inline void apply_preset(RunConfig& cfg, const std::string& name) {
  const double pi = std::numbers::pi;
  cfg.preset = name;
  cfg.phi0.reset();
  cfg.frequency = FrequencySpec{};
  if (name == "euclidean-n3") {
    cfg.params = ConeParams(1.0, 3, 0.0);
    cfg.x_grid = {0.1, 500.0, 90, "log"};
    cfg.phi_list = {0.0, 0.3, 0.5 * pi, 2.8, pi};
    cfg.bound = BoundKind::Interior;
  } else if (name == "smallx-attractive") {
    cfg.params = ConeParams(1.0, 3, -0.2);
    cfg.x_grid = {1e-6, 1.0, 145, "log"};
    cfg.phi_list = {0.0, 0.5 * pi, pi};
    cfg.bound = BoundKind::SmallX;
  } else if (name == "conjugate-growth") {
    cfg.params = ConeParams(2.0 / 3.0, 3, 0.0);
    cfg.phi0 = ConjugateAngle::Pi;
    cfg.x_grid = {100.0, 2000.0, 126, "log"};
    cfg.frequency = {200.0, 0.2, 512, std::nullopt};
    cfg.bound = BoundKind::Interior;
  } else if (name == "diagonal-growth") {
    cfg.params = ConeParams(1.0 / 3.0, 3, 0.0);
    cfg.phi0 = ConjugateAngle::Zero;
    cfg.x_grid = {100.0, 2000.0, 126, "log"};
    cfg.frequency = {200.0, 0.2, 512, std::nullopt};
    cfg.bound = BoundKind::Interior;
  } else if (name == "interior-bounded") {
    cfg.params = ConeParams(1.0 / 3.0, 3, 0.0);
    cfg.x_grid = {50.0, 2000.0, 155, "log"};
    cfg.phi_list = interior_angles(cfg.eps0);
    cfg.bound = BoundKind::Interior;
  } else {
    throw InputError("unknown preset '" + name + "'");
  }
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const GridSpec& g) {
  j = nlohmann::json{{"min", g.min}, {"max", g.max}, {"points", g.points}, {"scale", g.scale}};
}

inline void from_json(const nlohmann::json& j, GridSpec& g) {
  j.at("min").get_to(g.min);
  j.at("max").get_to(g.max);
  j.at("points").get_to(g.points);
  j.at("scale").get_to(g.scale);
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["preset"] = c.preset;
  j["params"] = c.params;
  j["x_grid"] = c.x_grid;
  j["phi_list"] = c.phi_list;
  j["phi0"] = c.phi0 ? nlohmann::json(to_string(*c.phi0)) : nlohmann::json(nullptr);
  j["eval"] = {{"x", c.eval.x},   {"phi", c.eval.phi}, {"physical", c.eval.physical},
               {"t", c.eval.t},   {"r1", c.eval.r1},   {"r2", c.eval.r2}};
  j["frequency"] = {{"x0", c.frequency.x0},
                    {"step", c.frequency.step},
                    {"points", c.frequency.points},
                    {"growth", c.frequency.growth ? nlohmann::json(*c.frequency.growth) : nlohmann::json(nullptr)}};
  j["tol"] = c.tol;
  j["with_prediction"] = c.with_prediction;
  j["bound"] = to_string(c.bound);
  j["threshold"] = c.threshold;
  j["eps0"] = c.eps0;
  j["bins_per_octave"] = c.bins_per_octave;
  j["output_path"] = c.output_path;
  j["workers"] = c.workers;
  return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.preset = j.at("preset").get<std::string>();
    c.params = cone_params_from_json(j.at("params"));
    c.x_grid = j.at("x_grid").get<GridSpec>();
    c.phi_list = j.at("phi_list").get<std::vector<double>>();
    if (!j.at("phi0").is_null()) c.phi0 = parse_conjugate_angle(j.at("phi0").get<std::string>());
    const auto& e = j.at("eval");
    c.eval = {e.at("x").get<double>(), e.at("phi").get<double>(), e.at("physical").get<bool>(),
              e.at("t").get<double>(), e.at("r1").get<double>(),   e.at("r2").get<double>()};
    const auto& f = j.at("frequency");
    c.frequency.x0 = f.at("x0").get<double>();
    c.frequency.step = f.at("step").get<double>();
    c.frequency.points = f.at("points").get<int>();
    if (!f.at("growth").is_null()) c.frequency.growth = f.at("growth").get<double>();
    c.tol = j.at("tol").get<double>();
    c.with_prediction = j.at("with_prediction").get<bool>();
    c.bound = bound_kind_from_string(j.at("bound").get<std::string>());
    c.threshold = j.at("threshold").get<double>();
    c.eps0 = j.at("eps0").get<double>();
    c.bins_per_octave = j.at("bins_per_octave").get<double>();
    c.output_path = j.at("output_path").get<std::string>();
    c.workers = j.at("workers").get<unsigned>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("RunConfig JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

// Writes through `fn` to the configured path, or to `out` for "-".
template <class Fn>
void write_output(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path == "-" || path.empty()) {
    fn(out);
    out.flush();
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  fn(file);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

inline void require_optimality_regime(const RunConfig& cfg) {
  if (cfg.phi0 && inverse_in_even_naturals(cfg.params.rho())) {
    throw UnsupportedRegimeError("1/rho = " + format_g17(1.0 / cfg.params.rho()) +
                                 " lies in 2N; growth at the conjugate angles is only predicted for n >= 3 and "
                                 "1/rho not in 2N");
  }
}

inline ScanOptions scan_options(const RunConfig& cfg, bool with_prediction) {
  return {cfg.tol, with_prediction, cfg.workers};
}

inline nlohmann::json params_json(const ConeParams& p) {
  nlohmann::json j = p;
  j["d"] = p.d();
  j["nu0"] = p.nu0();
  return j;
}

}  // namespace detail

/// eval: one value of I (or of the kernel with eval.physical) as JSON.
inline int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const ConeParams& p = cfg.params;
  nlohmann::json j;
  if (cfg.eval.physical) {
    const PhysicalPoint pt(cfg.eval.t, cfg.eval.r1, cfg.eval.r2, cfg.eval.phi);
    const SeriesResult s = eval_I(p, pt.spectral(), cfg.tol);
    const ComplexValue k = eval_kernel(p, pt, cfg.tol);
    const double scale = std::abs(k) > 0.0 && std::abs(s.value) > 0.0 ? std::abs(k) / std::abs(s.value) : 0.0;
    j = {{"re", k.real()},          {"im", k.imag()},
         {"modulus", std::abs(k)},  {"terms_used", s.terms_used},
         {"tail_bound", s.tail_bound * scale}, {"x", pt.spectral_x()}};
  } else {
    const SeriesResult s = eval_I(p, KernelPoint(cfg.eval.x, cfg.eval.phi), cfg.tol);
    j = {{"re", s.value.real()},
         {"im", s.value.imag()},
         {"modulus", std::abs(s.value)},
         {"terms_used", s.terms_used},
         {"tail_bound", s.tail_bound}};
  }
  detail::write_output(cfg.output_path, out, [&](std::ostream& os) { os << j.dump() << '\n'; });
  return exit_code::kOk;
}

/// scan: CSV table; metadata JSON next to it (`<output>.meta.json`), or on
/// `meta` when writing to standard output.
inline int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& meta) {
  if (cfg.with_prediction) detail::require_optimality_regime(cfg);
  const ScanTable table =
      scan(cfg.params, cfg.x_grid.values(), cfg.angles(), detail::scan_options(cfg, cfg.with_prediction));
  detail::write_output(cfg.output_path, out, [&](std::ostream& os) { write_csv(os, table); });
  nlohmann::json m{{"params", detail::params_json(cfg.params)}, {"rows", table.rows.size()}};
  std::size_t failed = 0;
  for (const auto& r : table.rows) failed += r.ok() ? 0 : 1;
  m["failed_rows"] = failed;
  if (table.pairing) m["pairing"] = *table.pairing;
  if (cfg.output_path == "-" || cfg.output_path.empty()) {
    meta << m.dump() << '\n';
  } else {
    detail::write_output(cfg.output_path + ".meta.json", out, [&](std::ostream& os) { os << m.dump(2) << '\n'; });
  }
  return exit_code::kOk;
}

/// critical: the D sets at phi0, or the C sets at the angles of the phi list.
inline int cmd_critical(const RunConfig& cfg, std::ostream& out) {
  const double rho = cfg.params.rho();
  nlohmann::json j{{"rho", rho},
                   {"q_bound", q_bound(rho)},
                   {"rho_at_least_one", rho >= 1.0},
                   {"rho_above_half", rho > 0.5},
                   {"inverse_in_2n", inverse_in_even_naturals(rho)}};
  if (cfg.phi0) {
    j["phi0"] = to_string(*cfg.phi0);
    nlohmann::json members = nlohmann::json::array();
    for (int s : {1, -1}) {
      for (const auto& d : conjugate_frequencies(rho, s, *cfg.phi0)) members.push_back(d);
    }
    j["conjugate_frequencies"] = members;
  } else {
    nlohmann::json sets = nlohmann::json::array();
    for (double phi : cfg.phi_list) {
      nlohmann::json members = nlohmann::json::array();
      for (int s1 : {1, -1}) {
        for (int s2 : {1, -1}) {
          for (const auto& d : critical_union(rho, s1, s2, phi)) members.push_back(d);
        }
      }
      sets.push_back({{"phi", phi}, {"members", members}});
    }
    j["critical_sets"] = sets;
  }
  detail::write_output(cfg.output_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return exit_code::kOk;
}

/// decay-fit: upper-envelope slope per angle, optional frequency extraction,
/// and at phi0 the residual against the principal term.
inline int cmd_decay_fit(const RunConfig& cfg, std::ostream& out) {
  detail::require_optimality_regime(cfg);
  const std::vector<double> angles = cfg.angles();
  const bool predict = cfg.phi0.has_value();
  const ScanTable table = scan(cfg.params, cfg.x_grid.values(), angles, detail::scan_options(cfg, predict));
  nlohmann::json fits = nlohmann::json::array();
  for (double phi : angles) {
    const auto env = upper_envelope(modulus_samples(table, phi), cfg.bins_per_octave);
    nlohmann::json f{{"phi", phi}, {"envelope_points", env.size()}, {"fit", fit_decay_exponent(env)}};
    if (predict) {
      std::vector<Sample> res;
      for (const ScanRow* r : rows_at(table, phi)) {
        if (r->ok() && r->prediction) res.emplace_back(r->x, std::abs(r->value - *r->prediction));
      }
      const auto renv = upper_envelope(res, cfg.bins_per_octave);
      if (renv.size() >= 8) f["residual_fit"] = fit_decay_exponent(renv);
    }
    fits.push_back(f);
  }
  nlohmann::json j{{"params", detail::params_json(cfg.params)}, {"fits", fits}};
  if (table.pairing) j["pairing"] = *table.pairing;
  if (cfg.frequency.points > 0) {
    const auto xs = uniform_grid(cfg.frequency.x0, cfg.frequency.step, static_cast<std::size_t>(cfg.frequency.points));
    const ScanTable ft = scan(cfg.params, xs, angles, detail::scan_options(cfg, false));
    nlohmann::json freqs = nlohmann::json::array();
    for (double phi : angles) {
      std::vector<ComplexValue> v;
      for (const ScanRow* r : rows_at(ft, phi)) {
        if (!r->ok()) throw PrecisionError("decay-fit: evaluation failed on the frequency grid: " + r->error, 0.0);
        v.push_back(r->value);
      }
      const bool conjugate = phi == 0.0 || phi == std::numbers::pi;
      const double growth = cfg.frequency.growth.value_or(conjugate ? cfg.params.d() : 0.0);
      freqs.push_back({{"phi", phi}, {"growth", growth}, {"result", dominant_frequency(xs, v, growth)}});
    }
    j["frequencies"] = freqs;
  }
  detail::write_output(cfg.output_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return exit_code::kOk;
}

/// verify: sup of |I| / envelope over the scan; exit 0 on pass, 1 on fail.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  detail::require_optimality_regime(cfg);
  const ScanTable table = scan(cfg.params, cfg.x_grid.values(), cfg.angles(), detail::scan_options(cfg, false));
  const BoundReport rep = verify_bound(table, cfg.bound, cfg.threshold);
  nlohmann::json j{{"params", detail::params_json(cfg.params)}, {"report", rep}};
  if (!cfg.preset.empty()) j["preset"] = cfg.preset;
  detail::write_output(cfg.output_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return rep.pass ? exit_code::kOk : exit_code::kBoundFailed;
}

/// Runs cfg.command, mapping failures to exit codes with a message on `err`.
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.workers < 1) throw InputError("--workers must be at least 1");
    if (!(cfg.tol > 0.0)) throw InputError("--tol must be positive");
    if (cfg.command == "eval") return cmd_eval(cfg, out);
    if (cfg.command == "scan") return cmd_scan(cfg, out, err);
    if (cfg.command == "critical") return cmd_critical(cfg, out);
    if (cfg.command == "decay-fit") return cmd_decay_fit(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    throw InputError("unknown command '" + cfg.command + "'");
  } catch (const UnsupportedRegimeError& e) {
    err << "unsupported regime: " << e.what() << '\n';
    return exit_code::kUnsupportedRegime;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::kIoFailure;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return exit_code::kInvalidInput;
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_code::kInvalidInput;
  } catch (const std::exception& e) {
    err << "evaluation failed: " << e.what() << '\n';
    return exit_code::kEvaluationFailed;
  }
}

}  // namespace conekernel
