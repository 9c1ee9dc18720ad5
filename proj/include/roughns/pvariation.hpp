#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace roughns {

// Norm of a two-index increment, addressed by grid indices i <= j.
using PairNorm = std::function<double(std::size_t, std::size_t)>;

// Superadditive two-index map on a grid, vanishing on the diagonal.
// Values are stored densely for pairs i <= j.
class GridControl {
 public:
  GridControl() = default;
  GridControl(std::vector<double> times, std::vector<double> packed_values);

  static GridControl from_function(std::vector<double> times, const PairNorm& fn);

  // omega(s, t) = t - s.
  static GridControl time_span(std::vector<double> times);

  double operator()(std::size_t i, std::size_t j) const;
  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

  GridControl scaled(double factor) const;

  // Max over all grid triples of omega(s,u) + omega(u,t) - omega(s,t);
  // <= tol means superadditive.
  double superadditivity_defect() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;
  std::vector<double> times_;
  std::vector<double> values_;  // packed upper triangle, row-major
};

struct MeshRestriction {
  PairNorm control;  // the control varpi restricting partition mesh
  double L = 1.0;
};

// sup over grid partitions of (sum |g|^p)^(1/p), by dynamic programming.
// With a mesh restriction only partitions whose neighboring points satisfy
// varpi(t_i, t_{i+1}) <= L are admissible. Ties between partitions are broken
// toward the coarser one (fewer points). Throws InvalidGrid on < 2 points;
// returns 0 when no admissible partition of [0, end] exists.
double p_variation(const PairNorm& increment_norm, std::size_t n_points, double p,
                   const std::optional<MeshRestriction>& mesh = std::nullopt);

// |g|^p_{p-var;[s,t]} for every grid pair, as a control table (O(n^3)).
GridControl pvar_control(const std::vector<double>& times, const PairNorm& increment_norm,
                         double p);

// Same quantity for a single interval [lo, hi] (O((hi-lo)^2)).
double pvar_power_on_interval(const PairNorm& increment_norm, std::size_t lo, std::size_t hi,
                              double p);

// Least-squares line through (x_i, y_i); r2 is the coefficient of determination.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace roughns
