#pragma once

// Evolution of pulse schedules: exact piecewise-constant propagation, the
// dynamical-phase ledger, and fixed-step RK4 integration of the Lindblad
// master equation
//
//   drho/dt = i[rho, H] + 1/2 sum_k rate_k (2 A rho A^+ - A^+A rho - rho A^+A).

#include "geoq/linalg.hpp"
#include "geoq/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoq {

/// Raised when the Lindblad integration drifts off the trace-one manifold.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dissipative channel; its rate is taken from ErrorModel::gamma1 (Decay)
/// or ErrorModel::gamma2 (Dephasing).
struct Channel {
  enum class Rate { Decay, Dephasing };
  SquareOperator op;
  Rate rate = Rate::Decay;
};

/// Maps pulse segments to Hamiltonians on some Hilbert space. The uncoded
/// qubit is the default; the dfs module provides encoded variants.
struct DriveModel {
  Eigen::Index dim = 2;
  std::function<SquareOperator(const PulseSegment&, double delta)> hamiltonian;
  std::vector<Channel> channels;
  std::vector<Eigen::Index> logical;  // computational subspace used for gate fidelities
};

/// 1/2 [Delta sz + Omega (cos(phase) sx + sin(phase) sy)] in the |0>,|1> basis.
inline SquareOperator drive_hamiltonian(const PulseSegment& seg) {
  SquareOperator h(2, 2);
  const Complex off = 0.5 * seg.rabi * std::exp(-kI * seg.phase);
  h << 0.5 * seg.detuning, off, std::conj(off), -0.5 * seg.detuning;
  return h;
}

/// Uncoded physical qubit: dephasing error enters as -delta Omega_m |1><1|;
/// decay sigma1 = |0><1|, dephasing sigma2 = |1><1| - |0><0|.
inline DriveModel qubit_model() {
  DriveModel m;
  m.dim = 2;
  m.hamiltonian = [](const PulseSegment& seg, double delta) {
    SquareOperator h = drive_hamiltonian(seg);
    h(1, 1) -= delta * kRabiUnit;
    return h;
  };
  SquareOperator lower = SquareOperator::Zero(2, 2);
  lower(0, 1) = 1.0;
  SquareOperator dephase = SquareOperator::Zero(2, 2);
  dephase(0, 0) = -1.0;
  dephase(1, 1) = 1.0;
  m.channels = {{lower, Channel::Rate::Decay}, {dephase, Channel::Rate::Dephasing}};
  m.logical = {0, 1};
  return m;
}

struct TrajectorySample {
  double time = 0.0;
  std::vector<double> populations;
  double state_fidelity = std::numeric_limits<double>::quiet_NaN();
};

struct EvolutionResult {
  std::optional<SquareOperator> final_propagator;  // unitary path
  std::optional<SquareOperator> final_density;     // Lindblad path
  std::vector<TrajectorySample> trajectory;
  std::vector<double> phase_ledger;  // per-segment dynamical phases (rad)
};

namespace detail {

// Hamiltonians and durations of a schedule after errors are folded in.
struct Piecewise {
  std::vector<SquareOperator> hamiltonians;
  std::vector<double> durations;
  ErrorModel error;
};

inline Piecewise piecewise(const Schedule& schedule, const ErrorModel& extra,
                           const DriveModel& model) {
  const Schedule executed = apply_error(schedule, extra);
  Piecewise p;
  p.error = executed.error;
  for (const auto& seg : executed.segments) {
    if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration)) {
      throw ValidationError("segment duration must be finite and non-negative");
    }
    p.hamiltonians.push_back(model.hamiltonian(seg, executed.error.delta));
    p.durations.push_back(seg.duration);
  }
  return p;
}

// The schedule with every folded-in coherent error removed.
inline Schedule nominal(Schedule schedule) {
  for (auto& seg : schedule.segments) seg.rabi /= 1.0 + schedule.error.epsilon;
  schedule.error = {};
  return schedule;
}

// Pure-state evolution along a piecewise-constant Hamiltonian, queried at
// increasing times.
class StateTracker {
 public:
  StateTracker(const Piecewise& p, StateVector psi0) : p_(p), psi_(std::move(psi0)) {}

  StateVector at(double t) {
    while (seg_ < p_.durations.size() && t >= start_ + p_.durations[seg_]) {
      psi_ = expm_hermitian(p_.hamiltonians[seg_], p_.durations[seg_]) * psi_;
      start_ += p_.durations[seg_];
      ++seg_;
    }
    if (seg_ == p_.durations.size() || t <= start_) return psi_;
    return expm_hermitian(p_.hamiltonians[seg_], t - start_) * psi_;
  }

 private:
  const Piecewise& p_;
  StateVector psi_;
  std::size_t seg_ = 0;
  double start_ = 0.0;
};

inline std::vector<double> sample_times(double total, int samples) {
  if (samples < 2 || total <= 0.0) return {0.0};
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) t[static_cast<std::size_t>(i)] = total * i / (samples - 1);
  t.back() = total;
  return t;
}

inline std::vector<double> populations(const SquareOperator& rho) {
  std::vector<double> pop(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) pop[static_cast<std::size_t>(i)] = rho(i, i).real();
  return pop;
}

inline std::vector<double> populations(const StateVector& psi) {
  std::vector<double> pop(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index i = 0; i < psi.size(); ++i) pop[static_cast<std::size_t>(i)] = std::norm(psi(i));
  return pop;
}

// Row-major vectorization: vec(rho)[a*d + b] = rho(a, b).
inline Eigen::VectorXcd vectorize(const SquareOperator& rho) {
  const Eigen::Index d = rho.rows();
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) v(a * d + b) = rho(a, b);
  return v;
}

inline SquareOperator unvectorize(const Eigen::VectorXcd& v, Eigen::Index d) {
  SquareOperator rho(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) rho(a, b) = v(a * d + b);
  return rho;
}

inline Complex vec_trace(const Eigen::VectorXcd& v, Eigen::Index d) {
  Complex tr = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) tr += v(a * d + a);
  return tr;
}

}  // namespace detail

/// Right-hand side of the master equation for a fixed Hamiltonian.
inline SquareOperator lindblad_rhs(const SquareOperator& rho, const SquareOperator& h,
                                   const std::vector<std::pair<double, SquareOperator>>& ops) {
  SquareOperator out = kI * (rho * h - h * rho);
  for (const auto& [rate, a] : ops) {
    if (rate == 0.0) continue;
    const SquareOperator ad = a.adjoint();
    const SquareOperator ada = ad * a;
    out += 0.5 * rate * (2.0 * a * rho * ad - ada * rho - rho * ada);
  }
  return out;
}

/// Liouvillian as a d^2 x d^2 matrix acting on row-major vec(rho).
inline SquareOperator liouvillian(const SquareOperator& h,
                                  const std::vector<std::pair<double, SquareOperator>>& ops) {
  const Eigen::Index d = h.rows();
  SquareOperator l(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      SquareOperator e = SquareOperator::Zero(d, d);
      e(a, b) = 1.0;
      l.col(a * d + b) = detail::vectorize(lindblad_rhs(e, h, ops));
    }
  }
  return l;
}

/// One classical RK4 step of size h for the linear ODE dv/dt = L v, written
/// as the equivalent matrix I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
inline SquareOperator rk4_step_map(const SquareOperator& l, double h) {
  const SquareOperator hl = h * l;
  SquareOperator map = identity(l.rows());
  SquareOperator term = identity(l.rows());
  for (int k = 1; k <= 4; ++k) {
    term = term * hl / static_cast<double>(k);
    map += term;
  }
  return map;
}

/// Propagator of the schedule with errors folded in.
inline SquareOperator schedule_propagator(const Schedule& schedule, const ErrorModel& error = {},
                                          const DriveModel& model = qubit_model()) {
  const auto p = detail::piecewise(schedule, error, model);
  SquareOperator u = identity(model.dim);
  for (std::size_t k = 0; k < p.durations.size(); ++k) {
    if (p.durations[k] == 0.0) continue;
    u = expm_hermitian(p.hamiltonians[k], p.durations[k]) * u;
  }
  return u;
}

/// Dynamical phase per segment: -integral <psi|H|psi> dt. Inside a segment
/// H is constant, so the energy is conserved and the integral is exact.
inline std::vector<double> dynamical_phase_ledger(const Schedule& schedule,
                                                  const StateVector& initial_state,
                                                  const ErrorModel& error = {},
                                                  const DriveModel& model = qubit_model()) {
  require_normalized(initial_state);
  if (initial_state.size() != model.dim) {
    throw ValidationError("initial state dimension does not match the drive model");
  }
  const auto p = detail::piecewise(schedule, error, model);
  std::vector<double> ledger;
  ledger.reserve(p.durations.size());
  StateVector psi = initial_state;
  for (std::size_t k = 0; k < p.durations.size(); ++k) {
    const double energy = psi.dot(p.hamiltonians[k] * psi).real();
    ledger.push_back(-energy * p.durations[k]);
    if (p.durations[k] > 0.0) psi = expm_hermitian(p.hamiltonians[k], p.durations[k]) * psi;
  }
  return ledger;
}

struct UnitaryOptions {
  std::optional<StateVector> initial_state;  // enables trajectory and ledger
  int samples = 200;
};

/// Exact propagation. With an initial state, also samples the trajectory
/// (fidelity against the error-free evolution) and fills the phase ledger.
inline EvolutionResult propagate_unitary(const Schedule& schedule, const ErrorModel& error = {},
                                         const DriveModel& model = qubit_model(),
                                         const UnitaryOptions& options = {}) {
  if (!error.closed() || !schedule.error.closed()) {
    throw ValidationError("propagate_unitary requires zero decoherence rates");
  }
  EvolutionResult result;
  result.final_propagator = schedule_propagator(schedule, error, model);
  if (!options.initial_state) return result;

  const StateVector& psi0 = *options.initial_state;
  result.phase_ledger = dynamical_phase_ledger(schedule, psi0, error, model);

  const auto actual = detail::piecewise(schedule, error, model);
  const auto ideal = detail::piecewise(detail::nominal(schedule), {}, model);
  detail::StateTracker track_actual(actual, psi0);
  detail::StateTracker track_ideal(ideal, psi0);
  for (double t : detail::sample_times(schedule.total_duration(), options.samples)) {
    const StateVector psi = track_actual.at(t);
    const StateVector ref = track_ideal.at(t);
    result.trajectory.push_back({t, detail::populations(psi), std::norm(ref.dot(psi))});
  }
  return result;
}

struct LindbladOptions {
  double step = 1e-3;        // maximal RK4 step in 1/Omega_m
  int samples = 200;         // trajectory samples (including t = 0 and t = T)
  double trace_abort = 1e-6; // abort threshold on |Tr rho - 1|
  /// Pure reference state for the fidelity column; when absent it is taken
  /// from rho0 if rho0 is pure.
  std::optional<StateVector> reference_state;
};

namespace detail {

inline std::vector<std::pair<double, SquareOperator>> rated_channels(const DriveModel& model,
                                                                     const ErrorModel& e) {
  std::vector<std::pair<double, SquareOperator>> ops;
  for (const auto& c : model.channels) {
    ops.emplace_back(c.rate == Channel::Rate::Decay ? e.gamma1 : e.gamma2, c.op);
  }
  return ops;
}

inline int step_count(double duration, double step) {
  if (duration <= 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(duration / step - 1e-9)));
}

inline std::optional<StateVector> pure_component(const SquareOperator& rho) {
  const double purity = (rho * rho).trace().real();
  if (std::abs(purity - 1.0) > 1e-10) return std::nullopt;
  Eigen::Index col = 0;
  rho.colwise().norm().maxCoeff(&col);
  StateVector psi = rho.col(col);
  return StateVector(psi / psi.norm());
}

}  // namespace detail

/// Integrates the master equation with fixed-step RK4 (step <= options.step).
inline EvolutionResult lindblad_evolve(const Schedule& schedule, const ErrorModel& error,
                                       const SquareOperator& rho0,
                                       const DriveModel& model = qubit_model(),
                                       const LindbladOptions& options = {}) {
  if (!(options.step > 0.0)) throw ValidationError("Lindblad step size must be positive");
  require_density_matrix(rho0);
  const Eigen::Index d = model.dim;
  if (rho0.rows() != d) throw ValidationError("rho0 dimension does not match the drive model");

  const auto p = detail::piecewise(schedule, error, model);
  const auto ops = detail::rated_channels(model, p.error);

  std::optional<StateVector> ref0 = options.reference_state;
  if (!ref0) ref0 = detail::pure_component(rho0);
  const auto ideal = detail::piecewise(detail::nominal(schedule), {}, model);
  std::optional<detail::StateTracker> track_ideal;
  if (ref0) track_ideal.emplace(ideal, *ref0);

  const std::vector<double> times = detail::sample_times(schedule.total_duration(), options.samples);
  std::size_t next_sample = 0;
  EvolutionResult result;

  auto record = [&](double t, const Eigen::VectorXcd& v) {
    const SquareOperator rho = detail::unvectorize(v, d);
    const Complex tr = rho.trace();
    if (!(std::abs(tr - 1.0) <= options.trace_abort)) {
      throw NumericalError("Lindblad trace drift " + std::to_string(std::abs(tr - 1.0)) +
                           " at t = " + std::to_string(t) + "; reduce the step size");
    }
    TrajectorySample s{t, detail::populations(rho), std::numeric_limits<double>::quiet_NaN()};
    if (track_ideal) s.state_fidelity = state_fidelity(rho, track_ideal->at(t));
    result.trajectory.push_back(std::move(s));
  };

  Eigen::VectorXcd v = detail::vectorize(rho0);
  double t0 = 0.0;
  for (std::size_t k = 0; k < p.durations.size(); ++k) {
    const int n = detail::step_count(p.durations[k], options.step);
    if (n == 0) continue;
    const double h = p.durations[k] / n;
    const SquareOperator l = liouvillian(p.hamiltonians[k], ops);
    const SquareOperator map = rk4_step_map(l, h);
    for (int i = 0; i < n; ++i) {
      const double t = t0 + h * i;
      // the final sample is taken from the end state below
      while (next_sample + 1 < times.size() && times[next_sample] < t + h) {
        const double dt = times[next_sample] - t;
        record(times[next_sample], dt <= 0.0 ? v : Eigen::VectorXcd(rk4_step_map(l, dt) * v));
        ++next_sample;
      }
      v = map * v;
      const Complex tr = detail::vec_trace(v, d);
      if (!(std::abs(tr - 1.0) <= options.trace_abort)) {
        throw NumericalError("Lindblad trace drift " + std::to_string(std::abs(tr - 1.0)) +
                             " at t = " + std::to_string(t + h) + "; reduce the step size");
      }
    }
    t0 += p.durations[k];
  }
  while (next_sample < times.size()) record(times[next_sample++], v);

  result.final_density = detail::unvectorize(v, d);
  return result;
}

/// The full quantum channel of the schedule as a d^2 x d^2 matrix, composed
/// from the same RK4 step maps lindblad_evolve uses (repeated squaring).
inline SquareOperator lindblad_superoperator(const Schedule& schedule, const ErrorModel& error,
                                             const DriveModel& model = qubit_model(),
                                             double step = 1e-3) {
  if (!(step > 0.0)) throw ValidationError("Lindblad step size must be positive");
  const auto p = detail::piecewise(schedule, error, model);
  const auto ops = detail::rated_channels(model, p.error);
  const Eigen::Index dd = model.dim * model.dim;
  SquareOperator total = identity(dd);
  for (std::size_t k = 0; k < p.durations.size(); ++k) {
    int n = detail::step_count(p.durations[k], step);
    if (n == 0) continue;
    SquareOperator base = rk4_step_map(liouvillian(p.hamiltonians[k], ops), p.durations[k] / n);
    SquareOperator power = identity(dd);
    while (n > 0) {
      if (n & 1) power = base * power;
      n >>= 1;
      if (n > 0) base = base * base;
    }
    total = power * total;
  }
  return total;
}

/// Gate fidelity of a channel restricted to the logical subspace:
/// sqrt(sum_ij <i|U^+ E(|i><j|) U|j>) / d_L. Equals |Tr(U^+ V)|/d_L when the
/// channel is conjugation by a unitary V.
inline double channel_gate_fidelity(const SquareOperator& superop, const SquareOperator& ideal,
                                    const DriveModel& model) {
  const auto& idx = model.logical;
  const Eigen::Index dl = static_cast<Eigen::Index>(idx.size());
  if (ideal.rows() != dl || ideal.cols() != dl) {
    throw ValidationError("ideal gate dimension does not match the logical subspace");
  }
  const Eigen::Index d = model.dim;
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < dl; ++i) {
    for (Eigen::Index j = 0; j < dl; ++j) {
      SquareOperator e = SquareOperator::Zero(d, d);
      e(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = 1.0;
      const SquareOperator out = detail::unvectorize(superop * detail::vectorize(e), d);
      SquareOperator block(dl, dl);
      for (Eigen::Index a = 0; a < dl; ++a)
        for (Eigen::Index b = 0; b < dl; ++b)
          block(a, b) = out(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      sum += (ideal.adjoint() * block * ideal)(i, j);
    }
  }
  return std::sqrt(std::max(0.0, sum.real())) / static_cast<double>(dl);
}

/// Restriction of an operator to the model's logical subspace.
inline SquareOperator logical_block(const SquareOperator& op, const DriveModel& model) {
  const auto& idx = model.logical;
  const Eigen::Index dl = static_cast<Eigen::Index>(idx.size());
  SquareOperator block(dl, dl);
  for (Eigen::Index a = 0; a < dl; ++a)
    for (Eigen::Index b = 0; b < dl; ++b)
      block(a, b) = op(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return block;
}

/// Gate fidelity of a schedule against `ideal` (on the logical subspace):
/// trace overlap for closed systems, channel fidelity otherwise.
inline double schedule_gate_fidelity(const Schedule& schedule, const ErrorModel& error,
                                     const SquareOperator& ideal,
                                     const DriveModel& model = qubit_model(),
                                     double step = 1e-3) {
  if (error.closed() && schedule.error.closed()) {
    return gate_fidelity(logical_block(schedule_propagator(schedule, error, model), model), ideal);
  }
  return channel_gate_fidelity(lindblad_superoperator(schedule, error, model, step), ideal, model);
}

}  // namespace geoq
