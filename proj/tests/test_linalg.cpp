#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace geoq;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("su2_rotation closed forms", "[linalg]") {
  SECTION("pi about x is -i sigma_x") {
    const auto u = su2_rotation({1, 0, 0}, kPi);
    CHECK(max_abs(u - (-kI * pauli_x())) < 1e-15);
  }
  SECTION("zero angle is the identity") {
    CHECK(max_abs(su2_rotation({0, 0, 1}, 0.0) - identity(2)) == 0.0);
  }
  SECTION("diagonal generator") {
    SquareOperator expected = SquareOperator::Zero(2, 2);
    expected(0, 0) = std::exp(kI * kPi / 4.0);
    expected(1, 1) = std::exp(-kI * kPi / 4.0);
    CHECK(max_abs(su2_rotation({0, 0, 1}, -kPi / 2.0) - expected) < 1e-15);
  }
  SECTION("non-unit axis is rejected") {
    CHECK_THROWS_AS(su2_rotation({1, 1, 0}, 1.0), ValidationError);
    CHECK_THROWS_WITH(su2_rotation({0.5, 0, 0}, 1.0), ContainsSubstring("normalized"));
  }
}

TEST_CASE("su2_rotation is special unitary and composes on a shared axis", "[linalg][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-10.0, 10.0), u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Axis3 n{u(rng), u(rng), u(rng)};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    for (double& c : n) c /= len;
    const double a = ang(rng), b = ang(rng);
    const auto ra = su2_rotation(n, a);
    CHECK(max_unitarity_error(ra) < 1e-12);
    CHECK(std::abs(ra.determinant() - 1.0) < 1e-12);
    CHECK(max_abs(ra * su2_rotation(n, b) - su2_rotation(n, a + b)) < 1e-12);
  }
}

TEST_CASE("expm_hermitian small cases", "[linalg]") {
  SECTION("zero generator") {
    CHECK(max_abs(expm_hermitian(SquareOperator::Zero(4, 4), 3.7) - identity(4)) < 1e-15);
    CHECK(max_abs(expm_hermitian(SquareOperator::Zero(2, 2), 3.7) - identity(2)) < 1e-15);
  }
  SECTION("sigma_z / 2 at t = pi") {
    SquareOperator expected = SquareOperator::Zero(2, 2);
    expected(0, 0) = std::exp(-kI * kPi / 2.0);
    expected(1, 1) = std::exp(kI * kPi / 2.0);
    CHECK(max_abs(expm_hermitian(0.5 * pauli_z(), kPi) - expected) < 1e-15);
  }
  SECTION("six-dimensional block Hamiltonian acts block-wise") {
    SquareOperator h = SquareOperator::Zero(6, 6);
    for (auto [a, b] : {std::pair{0, 1}, std::pair{4, 5}}) h(a, b) = h(b, a) = 0.5;
    const auto u = expm_hermitian(h, kPi);
    const auto block = su2_rotation({1, 0, 0}, kPi);  // -i sigma_x
    SquareOperator expected = identity(6);
    expected.block(0, 0, 2, 2) = block;
    expected.block(4, 4, 2, 2) = block;
    CHECK(max_abs(u - expected) < 1e-12);
  }
  SECTION("non-Hermitian input names the asymmetry") {
    SquareOperator h = SquareOperator::Zero(3, 3);
    h(0, 1) = 1.0;
    CHECK_THROWS_WITH(expm_hermitian(h, 1.0), ContainsSubstring("asymmetry"));
  }
  SECTION("dimension above 16 is rejected") {
    CHECK_THROWS_AS(expm_hermitian(SquareOperator::Zero(17, 17), 1.0), ValidationError);
  }
}

TEST_CASE("expm_hermitian is unitary and satisfies the semigroup law", "[linalg][property]") {
  std::mt19937_64 rng(5);
  for (Eigen::Index dim : {2, 4, 6, 16}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto h = testing::random_hermitian(rng, dim, 1.5);
      const double t = 0.3 + 0.4 * trial;
      const auto u = expm_hermitian(h, t);
      CHECK(max_unitarity_error(u) < 1e-10);
      CHECK(max_abs(expm_hermitian(h, 2.0 * t) - u * u) < 1e-10);
    }
  }
}

TEST_CASE("closed 2x2 path agrees with scaling-and-squaring", "[linalg][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    SquareOperator h = testing::random_hermitian(rng, 2, 2.0);
    h -= 0.5 * h.trace() * identity(2);  // traceless
    const double t = 0.1 * (trial + 1);
    const auto taylor = detail::expm_taylor(-kI * t * h);
    CHECK(max_abs(expm_hermitian(h, t) - taylor) < 1e-12);
  }
}

TEST_CASE("gate and state fidelity", "[linalg]") {
  const auto u = su2_rotation({0, 1, 0}, 0.7);
  CHECK(gate_fidelity(u, u) == Catch::Approx(1.0).margin(1e-15));
  CHECK(gate_fidelity(std::exp(kI * 1.3) * u, u) == Catch::Approx(1.0).margin(1e-15));
  CHECK(gate_fidelity(identity(2), pauli_x()) == 0.0);
  CHECK_THROWS_AS(gate_fidelity(identity(2), identity(4)), ValidationError);

  const StateVector zero = basis_state(2, 0);
  CHECK(state_fidelity(projector(zero), zero) == 1.0);
  StateVector psi(2);
  psi << std::cos(0.3), std::sin(0.3) * std::exp(kI * 0.8);
  CHECK(state_fidelity(0.5 * identity(2), psi) == Catch::Approx(0.5).margin(1e-15));
  CHECK_THROWS_AS(state_fidelity(identity(4) / 4.0, zero), ValidationError);
}

TEST_CASE("density matrix validation", "[linalg]") {
  CHECK_NOTHROW(require_density_matrix(0.5 * identity(2)));
  CHECK_THROWS_AS(require_density_matrix(identity(2)), ValidationError);
  SquareOperator bad = 0.5 * identity(2);
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(require_density_matrix(bad), ValidationError);
}
