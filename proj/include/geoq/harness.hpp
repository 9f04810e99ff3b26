#pragma once

// Experiment drivers behind the command-line tool: fidelity sweeps and
// heatmaps, trajectories, series-coefficient verification and the
// two-logical-qubit runs.

#include "geoq/dfs.hpp"
#include "geoq/engine.hpp"
#include "geoq/fit.hpp"
#include "geoq/io.hpp"
#include "geoq/schedule.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace geoq {

/// Raised when a verification target is missed; the CLI exits with code 3.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Gate selection

/// A single-qubit gate (named or explicit) or the two-logical-qubit U2.
struct GateSpec {
  std::string name;  // "S", "T", "H", "U2" or empty for explicit parameters
  GateParams params;
  double two_qubit_phase = kPi / 2.0;  // gamma~ for U2

  bool two_qubit() const { return name == "U2"; }

  static GateSpec named(const std::string& name) {
    if (name == "U2") return GateSpec{"U2", {}, kPi / 2.0};
    const auto g = named_gate(name);
    if (!g) {
      throw ValidationError("unknown gate '" + name + "'; known gates: " +
                            std::string(kKnownGates) + ", U2");
    }
    return GateSpec{name, *g, 0.0};
  }
  static GateSpec explicit_params(double theta, double phi, double gamma) {
    return GateSpec{"", GateParams::make(theta, phi, gamma), 0.0};
  }
};

enum class Encoding { None, Dfs };

inline Encoding parse_encoding(const std::string& s) {
  if (s == "none") return Encoding::None;
  if (s == "dfs") return Encoding::Dfs;
  throw ValidationError("unknown encoding '" + s + "' (expected none or dfs)");
}

/// Schedule, drive model and ideal logical gate of one experiment.
struct Experiment {
  Schedule schedule;
  DriveModel model;
  SquareOperator ideal;
};

inline Experiment make_experiment(const GateSpec& gate, const Scheme& scheme,
                                  Encoding encoding = Encoding::None) {
  if (gate.two_qubit()) {
    return {dfs::two_logical_schedule(gate.two_qubit_phase, scheme), dfs::two_logical_model(),
            dfs::two_logical_target(gate.two_qubit_phase)};
  }
  return {build_schedule(gate.params, scheme),
          encoding == Encoding::Dfs ? dfs::logical_qubit_model() : qubit_model(),
          gate.params.target()};
}

/// Gate fidelity of one experiment at one error point.
inline double experiment_fidelity(const Experiment& e, const ErrorModel& error,
                                  double step = 1e-3) {
  return schedule_gate_fidelity(e.schedule, error, e.ideal, e.model, step);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParam { Epsilon, Delta, Gamma };

inline std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Epsilon:
      return "epsilon";
    case SweepParam::Delta:
      return "delta";
    case SweepParam::Gamma:
      return "Gamma";
  }
  return "unknown";
}

inline SweepParam parse_sweep_param(const std::string& s) {
  if (s == "epsilon") return SweepParam::Epsilon;
  if (s == "delta") return SweepParam::Delta;
  if (s == "Gamma" || s == "gamma") return SweepParam::Gamma;
  throw ValidationError("unknown sweep axis '" + s + "' (expected epsilon, delta or Gamma)");
}

struct SweepAxis {
  SweepParam param = SweepParam::Epsilon;
  double min = -0.1;
  double max = 0.1;
  int count = 21;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      v[static_cast<std::size_t>(i)] = count == 1 ? min : min + (max - min) * i / (count - 1);
    }
    if (count > 1) v.back() = max;
    return v;
  }
};

/// Parses "a:b:n".
inline SweepAxis parse_grid(SweepParam param, const std::string& text) {
  SweepAxis axis{param, 0.0, 0.0, 0};
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> axis.min >> c1 >> axis.max >> c2 >> axis.count) || c1 != ':' || c2 != ':' ||
      !in.eof()) {
    throw ValidationError("grid must be 'min:max:count', got '" + text + "'");
  }
  return axis;
}

struct SweepSpec {
  Scheme scheme = Scheme::dyn_corrected();
  GateSpec gate = GateSpec::named("S");
  Encoding encoding = Encoding::None;
  SweepAxis axis1{SweepParam::Epsilon, -0.1, 0.1, 21};
  std::optional<SweepAxis> axis2;
  ErrorModel base;  // fixed epsilon/delta and rates (gamma1, gamma2)
  double step = 1e-3;
  std::string output;
  unsigned workers = 0;  // 0: hardware concurrency

  void validate() const {
    auto check = [](const SweepAxis& a) {
      if (a.count < 2) throw ValidationError("each sweep axis needs count >= 2");
      if (!std::isfinite(a.min) || !std::isfinite(a.max)) {
        throw ValidationError("sweep ranges must be finite");
      }
    };
    check(axis1);
    if (axis2) {
      check(*axis2);
      if (axis2->param == axis1.param) {
        throw ValidationError("sweep axes overlap: both are '" + to_string(axis1.param) + "'");
      }
    }
    if (!(step > 0.0)) throw ValidationError("step must be positive");
  }
};

struct SweepPoint {
  double x = 0.0;
  std::optional<double> y;
  double fidelity = 0.0;
};

inline void set_param(ErrorModel& e, SweepParam p, double value) {
  switch (p) {
    case SweepParam::Epsilon:
      e.epsilon = value;
      break;
    case SweepParam::Delta:
      e.delta = value;
      break;
    case SweepParam::Gamma:
      if (value < 0.0) throw ValidationError("Gamma must be non-negative");
      e.gamma1 = e.gamma2 = value;
      break;
  }
}

/// Evaluates fn(i) for i in [0, n) on `workers` threads; results keep index order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn, unsigned workers = 0) {
  std::vector<T> out(n);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    } catch (...) {
      errors[w] = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Runs a 1-D or 2-D sweep; rows are in row-major axis order (axis1 outer).
inline std::vector<SweepPoint> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const Experiment exp = make_experiment(spec.gate, spec.scheme, spec.encoding);
  const auto xs = spec.axis1.values();
  const std::vector<double> ys = spec.axis2 ? spec.axis2->values() : std::vector<double>{0.0};
  const std::size_t n = xs.size() * ys.size();
  return parallel_map<SweepPoint>(
      n,
      [&](std::size_t k) {
        const double x = xs[k / ys.size()];
        ErrorModel e = spec.base;
        set_param(e, spec.axis1.param, x);
        SweepPoint p{x, std::nullopt, 0.0};
        if (spec.axis2) {
          p.y = ys[k % ys.size()];
          set_param(e, spec.axis2->param, *p.y);
        }
        p.fidelity = experiment_fidelity(exp, e, spec.step);
        return p;
      },
      spec.workers);
}

inline void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                            const std::vector<SweepPoint>& points) {
  out << to_string(spec.axis1.param);
  if (spec.axis2) out << "," << to_string(spec.axis2->param);
  out << ",fidelity\n";
  for (const auto& p : points) {
    out << fmt::format("{}", p.x);
    if (p.y) out << fmt::format(",{}", *p.y);
    out << fmt::format(",{}\n", p.fidelity);
  }
}

inline SweepAxis axis_from_json(const nlohmann::json& j) {
  return SweepAxis{parse_sweep_param(j.at("name").get<std::string>()), j.at("min").get<double>(),
                   j.at("max").get<double>(), j.at("count").get<int>()};
}

inline GateSpec gate_from_json(const nlohmann::json& j) {
  if (j.is_string()) return GateSpec::named(j.get<std::string>());
  return GateSpec::explicit_params(j.at("theta").get<double>(), j.at("phi").get<double>(),
                                   j.at("gamma").get<double>());
}

/// SweepSpec from a JSON document with the same field names:
/// {scheme, loops, gate, encoding, axis1:{name,min,max,count}, axis2,
///  rates:{gamma1,gamma2}, epsilon, delta, step, output}.
inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  try {
    SweepSpec spec;
    if (j.contains("scheme")) {
      spec.scheme = parse_scheme(j["scheme"].get<std::string>(), j.value("loops", 2));
    }
    if (j.contains("gate")) spec.gate = gate_from_json(j["gate"]);
    if (j.contains("encoding")) spec.encoding = parse_encoding(j["encoding"].get<std::string>());
    if (j.contains("axis1")) spec.axis1 = axis_from_json(j["axis1"]);
    if (j.contains("axis2") && !j["axis2"].is_null()) spec.axis2 = axis_from_json(j["axis2"]);
    if (j.contains("rates")) {
      spec.base.gamma1 = j["rates"].value("gamma1", 0.0);
      spec.base.gamma2 = j["rates"].value("gamma2", 0.0);
    }
    spec.base.epsilon = j.value("epsilon", 0.0);
    spec.base.delta = j.value("delta", 0.0);
    spec.step = j.value("step", spec.step);
    spec.output = j.value("output", std::string{});
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed sweep config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Series verification

struct CoefficientCheck {
  std::string name;      // "c2", "c3", "c4"
  double expected = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool relative = true;  // tolerance relative to |expected|, else absolute bound on |measured|
  bool pass = false;
};

struct SeriesFit {
  PolynomialFit fit;
  std::vector<double> window;  // sampled epsilon values
  std::vector<CoefficientCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
};

namespace appendix {

inline double f1_s() { return (-2.0 + std::sqrt(2.0)) * kPi * kPi / 8.0; }
inline double f2_s() {
  return 0.25 * kPi * kPi *
         (-2.0 - std::sqrt(2.0) + std::sqrt(2.0 * (2.0 + std::sqrt(2.0))) +
          std::sqrt(2.0) * std::sin(kPi / 8.0));
}
inline double f3_s_quartic() { return (-2.0 + std::sqrt(2.0)) * std::pow(kPi, 4) / 32.0; }
inline double f1_h() { return -5.0 * kPi * kPi / 32.0; }
inline double f2_h() { return (-13.0 + 8.0 * std::sqrt(2.0)) * kPi * kPi / 32.0; }
inline double f3_h_quadratic() { return -2.0 * kPi * kPi / 87.0; }
inline double f3_h_cubic() { return std::pow(kPi, 3) / 41.0; }

/// Expected coefficients of F(epsilon) = 1 + c2 e^2 + c3 e^3 + c4 e^4 + ...
inline std::vector<CoefficientCheck> targets(const std::string& gate, const Scheme& scheme) {
  const auto rel = [](std::string name, double v, double tol) {
    return CoefficientCheck{std::move(name), v, 0.0, tol, true, false};
  };
  const bool two_loop = scheme.kind == SchemeKind::Composite && scheme.loops == 2;
  if (gate == "S") {
    if (scheme.kind == SchemeKind::SingleLoop) return {rel("c2", f1_s(), 0.01)};
    if (two_loop) return {rel("c2", f2_s(), 0.01)};
    if (scheme.kind == SchemeKind::DynCorrected) {
      return {CoefficientCheck{"c2", 0.0, 0.0, 1e-6, false, false}, rel("c4", f3_s_quartic(), 0.02)};
    }
  }
  if (gate == "H") {
    if (scheme.kind == SchemeKind::SingleLoop) return {rel("c2", f1_h(), 0.01)};
    if (two_loop) return {rel("c2", f2_h(), 0.01)};
    if (scheme.kind == SchemeKind::DynCorrected) {
      return {rel("c2", f3_h_quadratic(), 0.10), rel("c3", f3_h_cubic(), 0.10)};
    }
  }
  throw ValidationError("no series targets for gate '" + gate + "' with scheme " +
                        to_string(scheme) + " (gates S, H; schemes singleloop, composite, "
                        "dyncorrected)");
}

}  // namespace appendix

/// Fits F(epsilon) for a closed system on epsilon = 0 and +-[1e-4, 3e-2]
/// (21 points, degree 6) and compares c2..c4 with the analytic expansions.
inline SeriesFit verify_appendix(const std::string& gate, const Scheme& scheme,
                                 double residual_limit = 1e-8) {
  SeriesFit report;
  report.checks = appendix::targets(gate, scheme);
  const Experiment exp = make_experiment(GateSpec::named(gate), scheme);
  report.window = symmetric_log_grid(1e-4, 3e-2, 10);
  std::vector<double> fidelity;
  for (double eps : report.window) fidelity.push_back(experiment_fidelity(exp, ErrorModel{eps}));
  report.fit = fit_polynomial(report.window, fidelity, 6);
  if (report.fit.max_residual > residual_limit) {
    throw VerificationError(fmt::format("series fit residual {:.3g} exceeds {:.3g}",
                                        report.fit.max_residual, residual_limit));
  }
  for (auto& c : report.checks) {
    const std::size_t order = static_cast<std::size_t>(c.name[1] - '0');
    c.measured = report.fit.coefficient(order);
    c.pass = c.relative ? std::abs(c.measured - c.expected) <= c.tolerance * std::abs(c.expected)
                        : std::abs(c.measured) < c.tolerance;
  }
  return report;
}

inline nlohmann::json to_json(const SeriesFit& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"coefficient", c.name},
                      {"expected", c.expected},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"tolerance_kind", c.relative ? "relative" : "absolute"},
                      {"pass", c.pass}});
  }
  nlohmann::json coeffs = nlohmann::json::object();
  for (std::size_t k = 2; k <= 4; ++k) {
    coeffs["c" + std::to_string(k)] = {{"value", r.fit.coefficient(k)},
                                       {"stderr", r.fit.standard_errors.at(k)}};
  }
  return {{"coefficients", coeffs},
          {"fit_range", {r.window.front(), r.window.back()}},
          {"residual", r.fit.max_residual},
          {"checks", checks},
          {"pass", r.passed()}};
}

// ---------------------------------------------------------------------------
// Trajectories

/// "zero", "one", "plus" or comma-separated re,im pairs (normalized here).
inline StateVector parse_state(const std::string& text, Eigen::Index dim = 2) {
  if (dim == 2) {
    if (text == "zero") return basis_state(2, 0);
    if (text == "one") return basis_state(2, 1);
    if (text == "plus") return StateVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0));
  }
  if (text == "uniform") {
    return StateVector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  }
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("bad state spec '" + text +
                            "': expected zero, one, plus, uniform or re,im pairs");
    }
  }
  if (values.size() != static_cast<std::size_t>(2 * dim)) {
    throw ValidationError("bad state spec '" + text + "': expected " + std::to_string(2 * dim) +
                          " numbers");
  }
  StateVector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    psi(i) = Complex(values[static_cast<std::size_t>(2 * i)], values[static_cast<std::size_t>(2 * i + 1)]);
  }
  if (!(psi.norm() > 0.0)) throw ValidationError("bad state spec '" + text + "': zero vector");
  return psi / psi.norm();
}

struct TrajectorySpec {
  GateSpec gate = GateSpec::named("S");
  Scheme scheme = Scheme::dyn_corrected();
  Encoding encoding = Encoding::None;
  std::string state = "plus";
  ErrorModel error;
  LindbladOptions options;
};

/// Lindblad trajectory of one gate; the fidelity column is measured against
/// the error-free evolution of the same initial state.
inline EvolutionResult run_trajectory(const TrajectorySpec& spec) {
  const Experiment exp = make_experiment(spec.gate, spec.scheme, spec.encoding);
  StateVector psi;
  if (spec.gate.two_qubit()) {
    psi = dfs::embed_logical(parse_state(spec.state, 4));
  } else {
    psi = parse_state(spec.state, 2);
  }
  LindbladOptions options = spec.options;
  options.reference_state = psi;
  return lindblad_evolve(exp.schedule, spec.error, projector(psi), exp.model, options);
}

// ---------------------------------------------------------------------------
// Two logical qubits

struct TwoQubitReport {
  dfs::TwoQubitGate gate;
  EvolutionResult lindblad;
  double state_fidelity = 0.0;
};

inline TwoQubitReport run_two_qubit(double gamma_t, const Scheme& scheme, const ErrorModel& error,
                                    const StateVector& logical_state,
                                    dfs::TwoQubitNoise noise = dfs::TwoQubitNoise::PerLogicalQubit,
                                    LindbladOptions options = {}) {
  TwoQubitReport r;
  r.gate = dfs::run_two_logical_gate(gamma_t, error, scheme);
  r.lindblad = dfs::run_two_logical_lindblad(gamma_t, error, logical_state, scheme, noise, options);
  r.state_fidelity = r.lindblad.trajectory.back().state_fidelity;
  return r;
}

}  // namespace geoq
