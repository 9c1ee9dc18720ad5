// Test-only oracles, kept independent of the implementation paths they check.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <vector>

#include "roughns/grid.hpp"
#include "roughns/spectral.hpp"

namespace oracles {

// Exhaustive p-variation: enumerates every partition of a small grid,
// accumulating each candidate sum left to right (so the winning value is the
// same floating-point number the DP produces).
inline double pvar_exhaustive(const std::function<double(std::size_t, std::size_t)>& norm,
                              std::size_t n_points, double p) {
  const std::size_t interior = n_points - 2;
  double best = 0.0;
  const std::size_t masks = std::size_t{1} << interior;
  for (std::size_t mask = 0; mask < masks; ++mask) {
    std::vector<std::size_t> pts{0};
    for (std::size_t b = 0; b < interior; ++b) {
      if (mask & (std::size_t{1} << b)) pts.push_back(b + 1);
    }
    pts.push_back(n_points - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      sum += std::pow(norm(pts[i], pts[i + 1]), p);
    }
    if (sum > best) best = sum;
  }
  return std::pow(best, 1.0 / p);
}

// Riemann-sum iterated integral int_s^t (z^i_r - z^i_s) dz^j_r of the
// piecewise-linear interpolant, on a uniform refinement of [s, t].
inline Eigen::MatrixXd levy_riemann(const roughns::GridPath& path, double s, double t,
                                    std::size_t refinement) {
  const int K = path.channels();
  Eigen::MatrixXd zz = Eigen::MatrixXd::Zero(K, K);
  const double h = (t - s) / static_cast<double>(refinement);
  const Eigen::VectorXd zs = path.at(s);
  for (std::size_t r = 0; r < refinement; ++r) {
    const double a = s + r * h;
    const double b = a + h;
    const Eigen::VectorXd mid_rel = path.at(0.5 * (a + b)) - zs;
    const Eigen::VectorXd dz = path.at(b) - path.at(a);
    zz += mid_rel * dz.transpose();  // midpoint rule, exact for pw-linear z
  }
  return zz;
}

// Tensor-grid quadrature of int ((u.grad)v).w dx on [0,2pi)^2; the rectangle
// rule is exact for band-limited integrands once points > 3 * max band.
inline double trilinear_quadrature(const roughns::SpectralField& u,
                                   const roughns::SpectralField& v,
                                   const roughns::SpectralField& w, int points) {
  const double h = 2.0 * M_PI / points;
  std::vector<roughns::SpectralField> dv;
  for (int axis = 0; axis < 2; ++axis) dv.push_back(roughns::derivative(v, axis));
  double sum = 0.0;
  Eigen::VectorXd x(2);
  for (int i = 0; i < points; ++i) {
    x(0) = i * h;
    for (int j = 0; j < points; ++j) {
      x(1) = j * h;
      const Eigen::VectorXd uu = u.evaluate(x);
      const Eigen::VectorXd ww = w.evaluate(x);
      Eigen::VectorXd conv = uu(0) * dv[0].evaluate(x) + uu(1) * dv[1].evaluate(x);
      sum += conv.dot(ww);
    }
  }
  return sum * h * h;
}

// Largest singular value through Eigen's Jacobi SVD (the production route
// uses power iteration).
inline double svd_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace oracles
