#pragma once

// Dense complex linear algebra for the small operators (d <= 16) used by the
// pulse engine: Pauli matrices, SU(2) rotations and exp(-iHt).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace geoq {

using Complex = std::complex<double>;
using SquareOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Axis3 = std::array<double, 3>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Raised for any rejected input (bad parameters, dimension mismatch, ...).
/// The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical tolerances. Defaults match the documented contracts; callers
/// may tighten or loosen them per call.
struct Tolerances {
  double unit_axis = 1e-12;
  double hermitian = 1e-10;
  double unitary = 1e-10;
  double normalization = 1e-10;
  double trace = 1e-8;
};

inline SquareOperator identity(Eigen::Index dim) { return SquareOperator::Identity(dim, dim); }

inline SquareOperator pauli_x() {
  SquareOperator m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline SquareOperator pauli_y() {
  SquareOperator m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline SquareOperator pauli_z() {
  SquareOperator m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// n . sigma for a (not necessarily unit) 3-vector.
inline SquareOperator pauli_dot(const Axis3& n) {
  SquareOperator m(2, 2);
  m << n[2], Complex(n[0], -n[1]), Complex(n[0], n[1]), -n[2];
  return m;
}

inline double max_abs(const SquareOperator& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_hermitian_deviation(const SquareOperator& m) {
  return max_abs(m - m.adjoint());
}

inline double max_unitarity_error(const SquareOperator& u) {
  return max_abs(u.adjoint() * u - identity(u.rows()));
}

inline bool is_hermitian(const SquareOperator& m, double tol = Tolerances{}.hermitian) {
  return m.rows() == m.cols() && max_hermitian_deviation(m) <= tol;
}

inline bool is_unitary(const SquareOperator& u, double tol = Tolerances{}.unitary) {
  return u.rows() == u.cols() && max_unitarity_error(u) <= tol;
}

/// exp(-i (angle/2) n . sigma) = cos(angle/2) I - i sin(angle/2) n . sigma.
inline SquareOperator su2_rotation(const Axis3& axis, double angle,
                                   double unit_tol = Tolerances{}.unit_axis) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (!(std::abs(norm - 1.0) <= unit_tol)) {
    throw ValidationError("su2_rotation: axis is not normalized (|n| = " + std::to_string(norm) +
                          ")");
  }
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return c * identity(2) - kI * s * pauli_dot(axis);
}

namespace detail {

// exp(A) for a general small matrix by scaling and squaring a truncated Taylor
// series. A is scaled by 2^-k until its 1-norm is at most 0.5.
inline SquareOperator expm_taylor(const SquareOperator& a, int order = 18) {
  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const SquareOperator scaled = a / std::ldexp(1.0, squarings);

  // Horner form: I + A(I + A/2(I + A/3(...)))
  SquareOperator result = identity(n);
  for (int k = order; k >= 1; --k) {
    result = identity(n) + (scaled * result) / static_cast<double>(k);
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace detail

/// exp(-i H t) for Hermitian H. 2x2 inputs use the closed axis-angle form
/// (after removing the trace), larger ones scaling and squaring.
inline SquareOperator expm_hermitian(const SquareOperator& h, double t,
                                     const Tolerances& tol = {}) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ValidationError("expm_hermitian: operator must be square and non-empty");
  }
  if (h.rows() > 16) {
    throw ValidationError("expm_hermitian: dimension above 16 is not supported");
  }
  const double asym = max_hermitian_deviation(h);
  if (asym > tol.hermitian) {
    throw ValidationError("expm_hermitian: operator is not Hermitian (max asymmetry " +
                          std::to_string(asym) + ")");
  }
  if (h.rows() == 2) {
    // H = h0 I + h . sigma
    const double h0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const Axis3 vec{h(1, 0).real(), h(1, 0).imag(), 0.5 * (h(0, 0).real() - h(1, 1).real())};
    const double len = std::sqrt(vec[0] * vec[0] + vec[1] * vec[1] + vec[2] * vec[2]);
    const Complex global = std::exp(-kI * h0 * t);
    if (len == 0.0) return global * identity(2);
    const Axis3 axis{vec[0] / len, vec[1] / len, vec[2] / len};
    return global * su2_rotation(axis, 2.0 * len * t, 1e-9);
  }
  return detail::expm_taylor(-kI * t * h);
}

/// Trace-norm style overlap used as the gate metric: |Tr(ideal^dagger actual)| / d.
inline double gate_fidelity(const SquareOperator& actual, const SquareOperator& ideal) {
  if (actual.rows() != ideal.rows() || actual.cols() != ideal.cols() ||
      actual.rows() != actual.cols()) {
    throw ValidationError("gate_fidelity: dimension mismatch (" + std::to_string(actual.rows()) +
                          " vs " + std::to_string(ideal.rows()) + ")");
  }
  return std::abs((ideal.adjoint() * actual).trace()) / static_cast<double>(actual.rows());
}

/// <psi| rho |psi>, real part.
inline double state_fidelity(const SquareOperator& rho, const StateVector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) {
    throw ValidationError("state_fidelity: dimension mismatch (rho " +
                          std::to_string(rho.rows()) + ", psi " + std::to_string(psi.size()) +
                          ")");
  }
  return psi.dot(rho * psi).real();
}

inline SquareOperator projector(const StateVector& psi) { return psi * psi.adjoint(); }

inline StateVector basis_state(Eigen::Index dim, Eigen::Index index) {
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

/// Checks that rho is a Hermitian, unit-trace operator.
inline void require_density_matrix(const SquareOperator& rho, const Tolerances& tol = {}) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw ValidationError("density matrix must be square and non-empty");
  }
  if (max_hermitian_deviation(rho) > tol.hermitian) {
    throw ValidationError("density matrix is not Hermitian");
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw ValidationError("density matrix trace is " + std::to_string(tr.real()) + ", expected 1");
  }
}

inline void require_normalized(const StateVector& psi, const Tolerances& tol = {}) {
  if (std::abs(psi.norm() - 1.0) > tol.normalization) {
    throw ValidationError("state vector is not normalized (norm " + std::to_string(psi.norm()) +
                          ")");
  }
}

}  // namespace geoq
