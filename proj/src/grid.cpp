#include "roughns/grid.hpp"

#include <algorithm>
#include <cmath>

#include "roughns/errors.hpp"

namespace roughns {

std::vector<double> dyadic_times(double T, int depth) {
  if (T <= 0.0 || depth < 0) throw InvalidGrid("dyadic grid needs T > 0 and depth >= 0");
  const std::size_t n = (std::size_t{1} << depth) + 1;
  std::vector<double> times(n);
  const double h = T / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) * h;
  times.back() = T;
  return times;
}

Eigen::VectorXd GridPath::at(double t) const {
  validate();
  if (t <= times.front()) return values.row(0);
  if (t >= times.back()) return values.row(values.rows() - 1);
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[j - 1], t1 = times[j];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * values.row(j - 1) + w * values.row(j);
}

void GridPath::validate() const {
  if (times.size() < 2) throw InvalidGrid("path needs at least 2 grid points");
  if (times.front() != 0.0) throw InvalidGrid("grid must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidGrid("times must be strictly increasing");
  }
  if (static_cast<std::size_t>(values.rows()) != times.size()) {
    throw InvalidGrid("values/times length mismatch");
  }
}

bool is_uniform_grid(const std::vector<double>& times) {
  if (times.size() < 2) return false;
  const double h = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h))) return false;
  }
  return true;
}

}  // namespace roughns
