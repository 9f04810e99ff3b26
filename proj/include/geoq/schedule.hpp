#pragma once

// Piecewise-constant pulse schedules for the three geometric gate schemes:
// the single-loop (orange-slice) path, its N-loop composite iteration and the
// nine-segment dynamically corrected path. All amplitudes are in units of the
// maximal Rabi frequency, which is fixed to 1.

#include "geoq/linalg.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoq {

/// Drive amplitude of every square pulse (Omega_m).
inline constexpr double kRabiUnit = 1.0;

/// Reduces an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Target gate exp(i gamma n.sigma) with n = (sin t cos p, sin t sin p, cos t).
struct GateParams {
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;

  /// Validates theta in [0, pi] and stores phi, gamma in (-pi, pi].
  static GateParams make(double theta, double phi, double gamma) {
    if (!std::isfinite(theta) || !std::isfinite(phi) || !std::isfinite(gamma)) {
      throw ValidationError("gate parameters must be finite");
    }
    if (theta < 0.0 || theta > kPi + 1e-12) {
      throw ValidationError("theta must lie in [0, pi], got " + std::to_string(theta));
    }
    return GateParams{std::min(theta, kPi), wrap_angle(phi), wrap_angle(gamma)};
  }

  Axis3 axis() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  }

  /// exp(i gamma n.sigma)
  SquareOperator target() const { return su2_rotation(axis(), -2.0 * gamma); }

  /// |psi+> = cos(theta/2)|0> + sin(theta/2) e^{i phi}|1>, the cyclic state of the path.
  StateVector cyclic_state() const {
    StateVector v(2);
    v << std::cos(theta / 2.0), std::sin(theta / 2.0) * std::exp(kI * phi);
    return v;
  }
};

/// S, T and H gates of the geometric construction.
inline std::optional<GateParams> named_gate(std::string_view name) {
  if (name == "S") return GateParams::make(0.0, 0.0, -kPi / 4.0);
  if (name == "T") return GateParams::make(0.0, 0.0, -kPi / 8.0);
  if (name == "H") return GateParams::make(kPi / 4.0, 0.0, -kPi / 2.0);
  return std::nullopt;
}

inline constexpr std::string_view kKnownGates = "S, T, H";

struct PulseSegment {
  double duration = 0.0;  // 1/Omega_m
  double rabi = 0.0;      // Omega_m
  double phase = 0.0;     // rad
  double detuning = 0.0;  // Omega_m

  double plain_area() const { return duration * rabi; }
  double generalized_area() const { return duration * std::hypot(rabi, detuning); }
};

enum class SchemeKind { SingleLoop, Composite, DynCorrected };

struct Scheme {
  SchemeKind kind = SchemeKind::SingleLoop;
  int loops = 1;  // only meaningful for Composite

  static Scheme single_loop() { return {SchemeKind::SingleLoop, 1}; }
  static Scheme composite(int loops = 2) { return {SchemeKind::Composite, loops}; }
  static Scheme dyn_corrected() { return {SchemeKind::DynCorrected, 1}; }

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// "singleloop", "composite" (two loops), "composite-N", "dyncorrected".
inline std::string to_string(const Scheme& s) {
  switch (s.kind) {
    case SchemeKind::SingleLoop:
      return "singleloop";
    case SchemeKind::DynCorrected:
      return "dyncorrected";
    case SchemeKind::Composite:
      return s.loops == 2 ? "composite" : "composite-" + std::to_string(s.loops);
  }
  return "unknown";
}

inline Scheme parse_scheme(std::string_view name, int loops = 2) {
  if (name == "singleloop") return Scheme::single_loop();
  if (name == "dyncorrected") return Scheme::dyn_corrected();
  if (name == "composite") return Scheme::composite(loops);
  if (name.starts_with("composite-")) {
    const std::string digits(name.substr(10));
    try {
      return Scheme::composite(std::stoi(digits));
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("unknown scheme '" + std::string(name) +
                        "' (expected singleloop, composite or dyncorrected)");
}

/// Coherent error ratios and decoherence rates.
struct ErrorModel {
  double epsilon = 0.0;  // Rabi scaling (1 + epsilon)
  double delta = 0.0;    // dephasing shift in units of Omega_m
  double gamma1 = 0.0;   // decay rate
  double gamma2 = 0.0;   // dephasing rate

  bool coherent_free() const { return epsilon == 0.0 && delta == 0.0; }
  bool closed() const { return gamma1 == 0.0 && gamma2 == 0.0; }
};

struct Schedule {
  Scheme scheme;
  GateParams gate;
  std::vector<PulseSegment> segments;
  ErrorModel error;  // error already folded into the segments (see apply_error)

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }
  double plain_area() const {
    double a = 0.0;
    for (const auto& s : segments) a += s.plain_area();
    return a;
  }
};

inline PulseSegment resonant_segment(double area, double phase) {
  return PulseSegment{area / kRabiUnit, kRabiUnit, wrap_angle(phase), 0.0};
}

/// Three resonant pulses of areas (theta, pi, pi - theta) with drive phases
/// (phi - pi/2, phi + gamma + pi/2, phi - pi/2).
inline Schedule build_single_loop(const GateParams& gate) {
  const GateParams g = GateParams::make(gate.theta, gate.phi, gate.gamma);
  Schedule s{Scheme::single_loop(), g, {}, {}};
  s.segments = {
      resonant_segment(g.theta, g.phi - kPi / 2.0),
      resonant_segment(kPi, g.phi + g.gamma + kPi / 2.0),
      resonant_segment(kPi - g.theta, g.phi - kPi / 2.0),
  };
  return s;
}

/// N single loops, each carrying geometric phase gamma / N.
inline Schedule build_composite(const GateParams& gate, int loops = 2) {
  if (loops < 2) {
    throw ValidationError("composite scheme needs at least 2 loops, got " + std::to_string(loops));
  }
  const GateParams g = GateParams::make(gate.theta, gate.phi, gate.gamma);
  const Schedule unit =
      build_single_loop(GateParams{g.theta, g.phi, g.gamma / static_cast<double>(loops)});
  Schedule s{Scheme::composite(loops), g, {}, {}};
  s.segments.reserve(unit.segments.size() * static_cast<std::size_t>(loops));
  for (int i = 0; i < loops; ++i) {
    s.segments.insert(s.segments.end(), unit.segments.begin(), unit.segments.end());
  }
  return s;
}

/// Nine segments: each leg of the single loop is split in half and a
/// dynamical rotation is inserted in the middle. Legs 1 and 3 get tilted
/// rotations (detuned drives about the polar axes theta/2 and (theta+pi)/2),
/// leg 2 gets a resonant pi pulse.
inline Schedule build_dyn_corrected(const GateParams& gate) {
  const GateParams g = GateParams::make(gate.theta, gate.phi, gate.gamma);
  const double half = g.theta / 2.0;
  const double rest = kPi - g.theta;
  const double side = g.phi - kPi / 2.0;
  const double mid = g.phi + g.gamma + kPi / 2.0;

  // Detuned segment of generalized area `area` about the polar angle whose
  // sine and cosine are given: Delta = Omega cot, duration = area sin / Omega.
  auto tilted = [&](double area, double sin_t, double cos_t) {
    if (area == 0.0) return PulseSegment{0.0, kRabiUnit, wrap_angle(g.phi), 0.0};
    return PulseSegment{area * sin_t / kRabiUnit, kRabiUnit, wrap_angle(g.phi),
                        kRabiUnit * cos_t / sin_t + 0.0};  // no -0.0
  };

  Schedule s{Scheme::dyn_corrected(), g, {}, {}};
  s.segments = {
      resonant_segment(half, side),
      tilted(g.theta, std::sin(half), std::cos(half)),
      resonant_segment(half, side),
      resonant_segment(kPi / 2.0, mid),
      resonant_segment(kPi, mid + kPi / 2.0),
      resonant_segment(kPi / 2.0, mid),
      resonant_segment(rest / 2.0, side),
      // polar angle (theta + pi)/2: sin = cos(theta/2), cos = -sin(theta/2)
      tilted(rest, std::cos(half), -std::sin(half)),
      resonant_segment(rest / 2.0, side),
  };
  return s;
}

inline Schedule build_schedule(const GateParams& gate, const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::SingleLoop:
      return build_single_loop(gate);
    case SchemeKind::Composite:
      return build_composite(gate, scheme.loops);
    case SchemeKind::DynCorrected:
      return build_dyn_corrected(gate);
  }
  throw ValidationError("unknown scheme");
}

/// Folds coherent errors into a schedule: every Rabi amplitude is scaled by
/// (1 + epsilon); detunings are untouched. delta and the decoherence rates
/// are recorded in `error` for the evolution engine.
inline Schedule apply_error(Schedule schedule, const ErrorModel& error) {
  if (!(std::abs(error.epsilon) <= 0.5)) {
    throw ValidationError("|epsilon| must be at most 0.5, got " + std::to_string(error.epsilon));
  }
  if (!std::isfinite(error.delta)) throw ValidationError("delta must be finite");
  if (!(error.gamma1 >= 0.0) || !(error.gamma2 >= 0.0)) {
    throw ValidationError("decoherence rates must be non-negative");
  }
  for (auto& seg : schedule.segments) seg.rabi *= 1.0 + error.epsilon;
  auto& e = schedule.error;
  e.epsilon = (1.0 + e.epsilon) * (1.0 + error.epsilon) - 1.0;
  e.delta += error.delta;
  e.gamma1 += error.gamma1;
  e.gamma2 += error.gamma2;
  return schedule;
}

}  // namespace geoq
