#pragma once

// Decoherence-free-subspace encodings.
//
// One logical qubit lives in the single-excitation span of two physical
// qubits, |0>_L = |10>, |1>_L = |01>. Two logical qubits use four physical
// qubits; the exchange coupling between physical qubits 2 and 3 acts inside
// the six-dimensional span
//
//   S2' = { |00>_L=|1010>, |a1>=|1100>, |01>_L=|1001>,
//           |10>_L=|0110>, |11>_L=|0101>, |a2>=|0011> }
//
// and couples |00>_L <-> |a1> and |11>_L <-> |a2>. Driving both blocks with a
// theta = 0 phase-gate schedule yields diag(e^{-i g}, 1, 1, e^{-i g}).

#include "geoq/engine.hpp"
#include "geoq/linalg.hpp"
#include "geoq/schedule.hpp"

#include <string>
#include <vector>

namespace geoq::dfs {

struct LogicalEncoding {
  int physical_qubits = 2;
  std::vector<std::string> basis;  // physical bit strings, qubit 1 first
  std::vector<std::string> names;
  int excitations = 1;  // physical excitations per basis state

  Eigen::Index physical_dim() const { return Eigen::Index{1} << physical_qubits; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis.size()); }

  /// Columns are the basis states embedded in the physical Hilbert space.
  SquareOperator isometry() const {
    SquareOperator v = SquareOperator::Zero(physical_dim(), dim());
    for (std::size_t j = 0; j < basis.size(); ++j) {
      v(static_cast<Eigen::Index>(std::stoul(basis[j], nullptr, 2)), static_cast<Eigen::Index>(j)) =
          1.0;
    }
    return v;
  }
};

inline LogicalEncoding single_encoding() { return {2, {"10", "01"}, {"0L", "1L"}, 1}; }

// Index positions inside the 6-dim span.
enum TwoLogical : Eigen::Index { k00 = 0, kA1 = 1, k01 = 2, k10 = 3, k11 = 4, kA2 = 5 };

inline LogicalEncoding two_qubit_encoding() {
  return {4,
          {"1010", "1100", "1001", "0110", "0101", "0011"},
          {"00L", "a1", "01L", "10L", "11L", "a2"},
          2};
}

/// 1/2 [[Delta, J e^{-i varphi}], [J e^{i varphi}, -Delta]] on (|0>_L, |1>_L).
inline SquareOperator build_logical_single(double coupling, double varphi, double detuning) {
  return drive_hamiltonian(PulseSegment{1.0, coupling, varphi, detuning});
}

namespace detail {

inline SquareOperator op_on(int qubits, int which, const SquareOperator& single) {
  SquareOperator out = identity(1);
  for (int q = 0; q < qubits; ++q) {
    const SquareOperator factor = q == which ? single : identity(2);
    SquareOperator next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index a = 0; a < out.rows(); ++a)
      for (Eigen::Index b = 0; b < out.cols(); ++b)
        next.block(2 * a, 2 * b, 2, 2) = out(a, b) * factor;
    out = next;
  }
  return out;
}

inline SquareOperator raise() {
  SquareOperator m = SquareOperator::Zero(2, 2);
  m(1, 0) = 1.0;  // |1><0|
  return m;
}
inline SquareOperator lower() { return raise().transpose(); }
inline SquareOperator excited() {
  SquareOperator m = SquareOperator::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}
inline SquareOperator ground() {
  SquareOperator m = SquareOperator::Zero(2, 2);
  m(0, 0) = 1.0;
  return m;
}

}  // namespace detail

/// Exchange Hamiltonian of two physical qubits,
/// Delta S'_z + J/2 [e^{-i varphi} S1+ S2- + h.c.], S'_z = (n1 - n2)/2.
inline SquareOperator build_physical_two_qubit(double coupling, double varphi, double detuning) {
  using namespace detail;
  const SquareOperator sz_prime = 0.5 * (op_on(2, 0, excited()) - op_on(2, 1, excited()));
  const SquareOperator hop = op_on(2, 0, raise()) * op_on(2, 1, lower());
  SquareOperator h = detuning * sz_prime + 0.5 * coupling * std::exp(-kI * varphi) * hop;
  h += (0.5 * coupling * std::exp(-kI * varphi) * hop).adjoint().eval();
  return h;
}

/// The six-dimensional block Hamiltonian in S2' order. Each 2x2 block on
/// (|00>_L, |a1>) and (|11>_L, |a2>) is 1/2 [[-Dt, g e^{i ft}], [g e^{-i ft}, Dt]].
inline SquareOperator build_two_logical_6dim(double coupling, double varphi, double detuning) {
  SquareOperator h = SquareOperator::Zero(6, 6);
  for (auto [lo, hi] : {std::pair{k00, kA1}, std::pair{k11, kA2}}) {
    h(lo, lo) = -0.5 * detuning;
    h(hi, hi) = 0.5 * detuning;
    h(lo, hi) = 0.5 * coupling * std::exp(kI * varphi);
    h(hi, lo) = 0.5 * coupling * std::exp(-kI * varphi);
  }
  return h;
}

/// Four-qubit coupling
/// g/2 [e^{-i ft} (|1><1| (x) S2+ S3- (x) |0><0| + |0><0| (x) S2- S3+ (x) |1><1|) + h.c.].
/// Only the zero-detuning form is available.
inline SquareOperator build_physical_four_qubit(double coupling, double varphi) {
  using namespace detail;
  const SquareOperator forward = op_on(4, 0, excited()) * op_on(4, 1, raise()) *
                                 op_on(4, 2, lower()) * op_on(4, 3, ground());
  const SquareOperator backward = op_on(4, 0, ground()) * op_on(4, 1, lower()) *
                                  op_on(4, 2, raise()) * op_on(4, 3, excited());
  const SquareOperator half = 0.5 * coupling * std::exp(-kI * varphi) * (forward + backward);
  return half + half.adjoint();
}

/// Collective dephasing -delta Omega_m sum_i n_i restricted to the encoded
/// span: every basis state carries the same excitation number, so the term is
/// a multiple of the identity.
inline SquareOperator collective_dephasing_term(double delta, const LogicalEncoding& encoding) {
  return -delta * kRabiUnit * static_cast<double>(encoding.excitations) *
         identity(encoding.dim());
}

/// One DFS-encoded logical qubit driven through the exchange coupling.
inline DriveModel logical_qubit_model() {
  DriveModel m = qubit_model();
  m.hamiltonian = [](const PulseSegment& seg, double delta) {
    return SquareOperator(build_logical_single(seg.rabi, seg.phase, seg.detuning) +
                          collective_dephasing_term(delta, single_encoding()));
  };
  return m;
}

/// Collapse-operator placement for the two-logical-qubit simulation.
enum class TwoQubitNoise {
  /// sigma1 = |0>_L<1| and sigma2 = |1>_L<1| - |0>_L<0| on each logical
  /// qubit, lifted through the physical encoding (auxiliary states untouched).
  PerLogicalQubit,
  /// Block lowering |00>_L<a1|, |11>_L<a2| and block dephasing
  /// |00><00| - |a1><a1|, |11><11| - |a2><a2|.
  PerBlock,
};

inline std::vector<Channel> two_qubit_channels(TwoQubitNoise noise) {
  using Rate = Channel::Rate;
  std::vector<Channel> channels;
  if (noise == TwoQubitNoise::PerBlock) {
    for (auto [logical, aux] : {std::pair{k00, kA1}, std::pair{k11, kA2}}) {
      SquareOperator low = SquareOperator::Zero(6, 6);
      low(logical, aux) = 1.0;
      SquareOperator deph = SquareOperator::Zero(6, 6);
      deph(logical, logical) = 1.0;
      deph(aux, aux) = -1.0;
      channels.push_back({low, Rate::Decay});
      channels.push_back({deph, Rate::Dephasing});
    }
    return channels;
  }
  // Pair operators on the two physical qubits of one logical qubit:
  // |0>_L<1|_L = |10><01| and |1>_L<1|_L - |0>_L<0|_L = |01><01| - |10><10|.
  SquareOperator pair_lower = SquareOperator::Zero(4, 4);
  pair_lower(0b10, 0b01) = 1.0;
  SquareOperator pair_dephase = SquareOperator::Zero(4, 4);
  pair_dephase(0b01, 0b01) = 1.0;
  pair_dephase(0b10, 0b10) = -1.0;
  const SquareOperator v = two_qubit_encoding().isometry();
  const SquareOperator id4 = identity(4);
  auto lift = [&](const SquareOperator& first, const SquareOperator& second) {
    SquareOperator full(16, 16);
    for (Eigen::Index a = 0; a < 4; ++a)
      for (Eigen::Index b = 0; b < 4; ++b) full.block(4 * a, 4 * b, 4, 4) = first(a, b) * second;
    return SquareOperator(v.adjoint() * full * v);
  };
  channels.push_back({lift(pair_lower, id4), Rate::Decay});
  channels.push_back({lift(pair_dephase, id4), Rate::Dephasing});
  channels.push_back({lift(id4, pair_lower), Rate::Decay});
  channels.push_back({lift(id4, pair_dephase), Rate::Dephasing});
  return channels;
}

/// Two logical qubits in S2'. A segment (rabi, phase, detuning) drives both
/// blocks with (g, varphi~, Delta~); read in the order (|a1>, |00>_L) each
/// block has exactly the single-qubit drive layout.
inline DriveModel two_logical_model(TwoQubitNoise noise = TwoQubitNoise::PerLogicalQubit) {
  DriveModel m;
  m.dim = 6;
  m.hamiltonian = [](const PulseSegment& seg, double delta) {
    return SquareOperator(build_two_logical_6dim(seg.rabi, seg.phase, seg.detuning) +
                          collective_dephasing_term(delta, two_qubit_encoding()));
  };
  m.channels = two_qubit_channels(noise);
  m.logical = {k00, k01, k10, k11};
  return m;
}

/// diag(e^{-i g}, 1, 1, e^{-i g}) on (|00>, |01>, |10>, |11>)_L.
inline SquareOperator two_logical_target(double gamma_t) {
  SquareOperator u = identity(4);
  u(0, 0) = std::exp(-kI * gamma_t);
  u(3, 3) = std::exp(-kI * gamma_t);
  return u;
}

/// Block schedule for U2(gamma_t): theta = phi = 0 phase gate with geometric
/// phase gamma_t, so the block state |00>_L (block |1>) acquires e^{-i gamma_t}.
inline Schedule two_logical_schedule(double gamma_t, const Scheme& scheme = Scheme::dyn_corrected()) {
  return build_schedule(GateParams::make(0.0, 0.0, gamma_t), scheme);
}

struct TwoQubitGate {
  SquareOperator full;     // 6x6 propagator on S2'
  SquareOperator logical;  // 4x4 sub-block on the logical states
  double leakage = 0.0;    // Frobenius norm of the logical -> auxiliary block
  double fidelity = 0.0;   // against two_logical_target
};

inline TwoQubitGate run_two_logical_gate(double gamma_t, const ErrorModel& error = {},
                                         const Scheme& scheme = Scheme::dyn_corrected()) {
  const DriveModel model = two_logical_model();
  ErrorModel coherent = error;
  coherent.gamma1 = coherent.gamma2 = 0.0;
  TwoQubitGate g;
  g.full = schedule_propagator(two_logical_schedule(gamma_t, scheme), coherent, model);
  g.logical = logical_block(g.full, model);
  double leak = 0.0;
  for (Eigen::Index aux : {Eigen::Index{kA1}, Eigen::Index{kA2}})
    for (Eigen::Index col : model.logical) leak += std::norm(g.full(aux, col));
  g.leakage = std::sqrt(leak);
  g.fidelity = gate_fidelity(g.logical, two_logical_target(gamma_t));
  return g;
}

/// Embeds a logical two-qubit state (|00>, |01>, |10>, |11>) into S2'.
inline StateVector embed_logical(const StateVector& logical) {
  if (logical.size() != 4) throw ValidationError("two-logical-qubit state must have 4 amplitudes");
  StateVector v = StateVector::Zero(6);
  v(k00) = logical(0);
  v(k01) = logical(1);
  v(k10) = logical(2);
  v(k11) = logical(3);
  return v;
}

/// Lindblad evolution of U2(gamma_t) from a logical initial state.
inline EvolutionResult run_two_logical_lindblad(double gamma_t, const ErrorModel& error,
                                                const StateVector& logical_state,
                                                const Scheme& scheme = Scheme::dyn_corrected(),
                                                TwoQubitNoise noise = TwoQubitNoise::PerLogicalQubit,
                                                LindbladOptions options = {}) {
  require_normalized(logical_state);
  const StateVector psi = embed_logical(logical_state);
  if (!options.reference_state) options.reference_state = psi;
  return lindblad_evolve(two_logical_schedule(gamma_t, scheme), error, projector(psi),
                         two_logical_model(noise), options);
}

}  // namespace geoq::dfs
