#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace roughns {

// Uniform dyadic grid on [0, T]: 2^depth steps, 2^depth + 1 points.
std::vector<double> dyadic_times(double T, int depth);

// A driver path sampled on a strictly increasing time grid.
// values is (n_points x K); row i holds z(times[i]).
struct GridPath {
  std::vector<double> times;
  Eigen::MatrixXd values;

  std::size_t size() const { return times.size(); }
  int channels() const { return static_cast<int>(values.cols()); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }

  // Piecewise-linear evaluation; t clamped to [times.front(), times.back()].
  Eigen::VectorXd at(double t) const;

  // Throws InvalidGrid unless times[0] == 0, times strictly increasing and
  // values.rows() == times.size().
  void validate() const;
};

// True if times form a uniform grid (up to relative rounding slack).
bool is_uniform_grid(const std::vector<double>& times);

}  // namespace roughns
