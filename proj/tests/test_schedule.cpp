#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace geoq;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("wrap_angle maps into (-pi, pi]", "[schedule]") {
  CHECK(wrap_angle(-kPi) == Catch::Approx(kPi));
  CHECK(wrap_angle(kPi) == Catch::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi / 2.0) == Catch::Approx(-kPi / 2.0));
  CHECK(wrap_angle(-2.0 * kPi) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("GateParams validation and targets", "[schedule]") {
  CHECK_THROWS_AS(GateParams::make(-0.1, 0, 0), ValidationError);
  CHECK_THROWS_AS(GateParams::make(4.0, 0, 0), ValidationError);
  CHECK_THROWS_AS(GateParams::make(0.0, std::nan(""), 0), ValidationError);
  CHECK_FALSE(named_gate("X").has_value());

  const auto s = *named_gate("S");
  CHECK(max_abs(s.target() - testing::to_operator(oracle::phase_gate(-kPi / 4.0))) < 1e-15);

  // H = exp(-i pi/2 (sigma_x + sigma_z)/sqrt2) is the Hadamard up to a global phase.
  SquareOperator hadamard(2, 2);
  hadamard << 1.0, 1.0, 1.0, -1.0;
  hadamard /= std::sqrt(2.0);
  CHECK(gate_fidelity(named_gate("H")->target(), hadamard) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("single-loop builder", "[schedule]") {
  const auto s = build_single_loop(*named_gate("S"));
  REQUIRE(s.segments.size() == 3);
  CHECK(s.segments[0].plain_area() == 0.0);
  CHECK(s.segments[1].plain_area() == Catch::Approx(kPi));
  CHECK(s.segments[2].plain_area() == Catch::Approx(kPi));
  CHECK(s.segments[0].phase == Catch::Approx(-kPi / 2.0));
  CHECK(s.segments[1].phase == Catch::Approx(kPi / 4.0));
  CHECK(s.segments[2].phase == Catch::Approx(-kPi / 2.0));
  for (const auto& seg : s.segments) CHECK(seg.detuning == 0.0);
}

TEST_CASE("composite builder", "[schedule]") {
  const auto gate = *named_gate("H");
  CHECK_THROWS_WITH(build_composite(gate, 1), ContainsSubstring("at least 2"));
  const auto three = build_composite(gate, 3);
  REQUIRE(three.segments.size() == 9);
  CHECK(three.scheme == Scheme::composite(3));
  CHECK(three.segments[1].phase == Catch::Approx(wrap_angle(gate.gamma / 3.0 + kPi / 2.0)));
  CHECK(three.segments[4].phase == three.segments[1].phase);
}

TEST_CASE("dyn-corrected builder", "[schedule]") {
  SECTION("Hadamard detunings") {
    const auto s = build_dyn_corrected(*named_gate("H"));
    REQUIRE(s.segments.size() == 9);
    CHECK(s.segments[1].detuning == Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.segments[7].detuning == Catch::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.segments[1].generalized_area() == Catch::Approx(kPi / 4.0));
    CHECK(s.segments[7].generalized_area() == Catch::Approx(3.0 * kPi / 4.0));
    CHECK(s.segments[4].phase == Catch::Approx(kPi / 2.0));
  }
  SECTION("theta = 0 degenerates to resonant pulses") {
    const auto s = build_dyn_corrected(*named_gate("T"));
    CHECK(s.segments[1].duration == 0.0);
    CHECK(s.segments[7].detuning == 0.0);
    CHECK_FALSE(std::signbit(s.segments[7].detuning));
    CHECK(s.segments[7].generalized_area() == Catch::Approx(kPi));
  }
}

TEST_CASE("dyn-corrected schedule stays within 4 pi of plain area", "[schedule][property]") {
  for (const auto& g : testing::gate_grid(8)) {
    const auto s = build_dyn_corrected(g);
    CHECK(s.plain_area() <= 4.0 * kPi + 1e-12);
    CHECK(s.plain_area() >= 3.0 * kPi - 1e-12);
  }
}

TEST_CASE("dyn-corrected middle block is the inserted pi rotation", "[schedule][property]") {
  // pi/2 about a, pi about a + pi/2, pi/2 about a compose to pi about a + pi/2.
  for (const auto& g : testing::gate_grid(6)) {
    const auto dyn = build_dyn_corrected(g);
    Schedule middle;
    middle.segments.assign(dyn.segments.begin() + 3, dyn.segments.begin() + 6);
    Schedule single;
    single.segments = {resonant_segment(kPi, g.phi + g.gamma + kPi)};
    const auto u = testing::to_operator(oracle::exact_propagator(testing::to_oracle(middle), 0, 0));
    const auto v = testing::to_operator(oracle::exact_propagator(testing::to_oracle(single), 0, 0));
    CHECK(max_abs(u - v) < 1e-10);
  }
}

TEST_CASE("apply_error", "[schedule]") {
  const auto base = build_dyn_corrected(*named_gate("H"));
  SECTION("scales rabi only") {
    const auto s = apply_error(base, ErrorModel{0.1, 0.02, 1e-4, 2e-4});
    for (std::size_t k = 0; k < base.segments.size(); ++k) {
      CHECK(s.segments[k].rabi == Catch::Approx(1.1 * base.segments[k].rabi));
      CHECK(s.segments[k].detuning == base.segments[k].detuning);
      CHECK(s.segments[k].duration == base.segments[k].duration);
    }
    CHECK(s.error.delta == 0.02);
    CHECK(s.error.gamma2 == 2e-4);
  }
  SECTION("rejects invalid errors") {
    CHECK_THROWS_AS(apply_error(base, ErrorModel{0.6}), ValidationError);
    CHECK_THROWS_AS(apply_error(base, ErrorModel{0.0, 0.0, -1e-4}), ValidationError);
    CHECK_THROWS_AS(apply_error(base, ErrorModel{0.0, INFINITY}), ValidationError);
  }
}

TEST_CASE("apply_error composes multiplicatively", "[schedule][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-0.2, 0.2);
  const auto base = build_composite(*named_gate("H"));
  for (int trial = 0; trial < 50; ++trial) {
    const double a = e(rng), b = e(rng);
    const auto twice = apply_error(apply_error(base, ErrorModel{a}), ErrorModel{b});
    const auto once = apply_error(base, ErrorModel{(1 + a) * (1 + b) - 1});
    CHECK(twice.error.epsilon == Catch::Approx(once.error.epsilon).margin(1e-15));
    for (std::size_t k = 0; k < base.segments.size(); ++k) {
      CHECK(twice.segments[k].rabi == Catch::Approx(once.segments[k].rabi).epsilon(1e-14));
    }
  }
}

TEST_CASE("scheme names", "[schedule]") {
  for (const auto& s : {Scheme::single_loop(), Scheme::composite(), Scheme::composite(4),
                        Scheme::dyn_corrected()}) {
    CHECK(parse_scheme(to_string(s), s.loops) == s);
  }
  CHECK(parse_scheme("composite", 3) == Scheme::composite(3));
  CHECK_THROWS_WITH(parse_scheme("twoloop"), ContainsSubstring("unknown scheme"));
}

TEST_CASE("schedule JSON round trip", "[schedule][io]") {
  for (const auto& scheme : {Scheme::single_loop(), Scheme::composite(), Scheme::dyn_corrected()}) {
    const auto s = apply_error(build_schedule(*named_gate("H"), scheme), ErrorModel{0.05, 0.01});
    const auto j = to_json(s);
    const auto back = schedule_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.scheme == s.scheme);
    REQUIRE(back.segments.size() == s.segments.size());
    for (std::size_t k = 0; k < s.segments.size(); ++k) {
      CHECK(back.segments[k].duration == s.segments[k].duration);
      CHECK(back.segments[k].rabi == s.segments[k].rabi);
      CHECK(back.segments[k].phase == s.segments[k].phase);
      CHECK(back.segments[k].detuning == s.segments[k].detuning);
    }
    CHECK(back.error.epsilon == s.error.epsilon);
    CHECK(back.error.delta == s.error.delta);
  }
  CHECK_THROWS_AS(schedule_from_json(nlohmann::json{{"scheme", "singleloop"}}), ValidationError);
  CHECK_THROWS_AS(schedule_from_json(nlohmann::json::parse(
                      R"({"scheme":"singleloop","gate":{"theta":0,"phi":0,"gamma":0},)"
                      R"("segments":[{"duration":-1,"rabi":1,"phase":0,"detuning":0}]})")),
                  ValidationError);
}
