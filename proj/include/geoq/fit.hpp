#pragma once

// Least-squares polynomial fits of fidelity-versus-error curves, used to read
// off low-order series coefficients.

#include "geoq/linalg.hpp"

#include <Eigen/QR>

#include <cmath>
#include <span>
#include <vector>

namespace geoq {

struct PolynomialFit {
  std::vector<double> coefficients;     // c0, c1, ..., c_degree
  std::vector<double> standard_errors;  // same indexing
  double max_residual = 0.0;

  double coefficient(std::size_t k) const { return k < coefficients.size() ? coefficients[k] : 0.0; }
};

/// Fits y = sum_k c_k x^k. The abscissae are scaled to [-1, 1] before the QR
/// solve so that high degrees on narrow windows stay well conditioned.
inline PolynomialFit fit_polynomial(std::span<const double> x, std::span<const double> y,
                                    int degree) {
  if (x.size() != y.size()) throw ValidationError("fit_polynomial: x and y differ in length");
  if (degree < 0 || x.size() < static_cast<std::size_t>(degree) + 1) {
    throw ValidationError("fit_polynomial: need at least degree + 1 samples");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index m = degree + 1;
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi));
  if (scale == 0.0) scale = 1.0;

  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = x[static_cast<std::size_t>(i)] / scale;
    double p = 1.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      a(i, k) = p;
      p *= u;
    }
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd scaled = qr.solve(b);
  const Eigen::VectorXd residual = b - a * scaled;

  // Covariance of the scaled coefficients: s^2 (A^T A)^{-1}.
  const double dof = static_cast<double>(std::max<Eigen::Index>(n - m, 1));
  const double s2 = residual.squaredNorm() / dof;
  const Eigen::MatrixXd cov = s2 * (a.transpose() * a).inverse();

  PolynomialFit fit;
  fit.max_residual = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
  double unscale = 1.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    fit.coefficients.push_back(scaled(k) / unscale);
    fit.standard_errors.push_back(std::sqrt(std::max(0.0, cov(k, k))) / unscale);
    unscale *= scale;
  }
  return fit;
}

/// Zero plus `per_side` logarithmically spaced magnitudes in [lo, hi] on
/// each side of zero, in increasing order.
inline std::vector<double> symmetric_log_grid(double lo, double hi, int per_side) {
  std::vector<double> mags;
  for (int i = 0; i < per_side; ++i) {
    const double f = per_side == 1 ? 1.0 : static_cast<double>(i) / (per_side - 1);
    mags.push_back(lo * std::pow(hi / lo, f));
  }
  std::vector<double> grid;
  for (auto it = mags.rbegin(); it != mags.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  grid.insert(grid.end(), mags.begin(), mags.end());
  return grid;
}

}  // namespace geoq
