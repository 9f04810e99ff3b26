#pragma once

#include "geoq/geoq.hpp"
#include "oracles.hpp"

#include <random>
#include <vector>

namespace testing {

inline geoq::Schedule to_schedule(const std::vector<oracle::Segment>& segs) {
  geoq::Schedule s;
  for (const auto& o : segs) s.segments.push_back({o.duration, o.rabi, o.phase, o.detuning});
  return s;
}

inline std::vector<oracle::Segment> to_oracle(const geoq::Schedule& s) {
  std::vector<oracle::Segment> out;
  for (const auto& seg : s.segments) out.push_back({seg.duration, seg.rabi, seg.phase, seg.detuning});
  return out;
}

inline geoq::SquareOperator to_operator(const oracle::M2& m) {
  geoq::SquareOperator op(2, 2);
  op << m[0], m[1], m[2], m[3];
  return op;
}

inline geoq::SquareOperator random_hermitian(std::mt19937_64& rng, Eigen::Index dim,
                                             double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  geoq::SquareOperator a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = geoq::Complex(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

/// The (theta, phi, gamma) grid with `n` points per axis: theta in [0, pi],
/// phi and gamma in [-pi, pi).
inline std::vector<geoq::GateParams> gate_grid(int n) {
  std::vector<geoq::GateParams> grid;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double theta = geoq::kPi * i / (n - 1);
        const double phi = -geoq::kPi + 2.0 * geoq::kPi * j / n;
        const double gamma = -geoq::kPi + 2.0 * geoq::kPi * k / n;
        grid.push_back(geoq::GateParams::make(theta, phi, gamma));
      }
  return grid;
}

}  // namespace testing
