#include "roughns/pvariation.hpp"

#include <cmath>
#include <limits>

#include "roughns/errors.hpp"

namespace roughns {

GridControl::GridControl(std::vector<double> times, std::vector<double> packed_values)
    : times_(std::move(times)), values_(std::move(packed_values)) {}

std::size_t GridControl::index(std::size_t i, std::size_t j) const {
  // packed upper triangle including the diagonal
  const std::size_t n = times_.size();
  return i * n - i * (i + 1) / 2 + j;
}

GridControl GridControl::from_function(std::vector<double> times, const PairNorm& fn) {
  const std::size_t n = times.size();
  std::vector<double> vals(n * (n + 1) / 2, 0.0);
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) vals[at++] = (j == i) ? 0.0 : fn(i, j);
  }
  return GridControl(std::move(times), std::move(vals));
}

GridControl GridControl::time_span(std::vector<double> times) {
  std::vector<double> copy = times;
  return from_function(std::move(copy),
                       [t = std::move(times)](std::size_t i, std::size_t j) { return t[j] - t[i]; });
}

double GridControl::operator()(std::size_t i, std::size_t j) const {
  if (j < i) std::swap(i, j);
  return values_[index(i, j)];
}

GridControl GridControl::scaled(double factor) const {
  std::vector<double> vals = values_;
  for (double& v : vals) v *= factor;
  return GridControl(times_, std::move(vals));
}

double GridControl::superadditivity_defect() const {
  const std::size_t n = times_.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t u = i + 1; u < n; ++u) {
      const double left = (*this)(i, u);
      for (std::size_t j = u + 1; j < n; ++j) {
        const double gap = left + (*this)(u, j) - (*this)(i, j);
        if (gap > worst) worst = gap;
      }
    }
  }
  return worst;
}

double p_variation(const PairNorm& increment_norm, std::size_t n_points, double p,
                   const std::optional<MeshRestriction>& mesh) {
  if (n_points < 2) throw InvalidGrid("p-variation needs at least 2 grid points");
  if (!(p > 0.0)) throw InvalidGrid("p-variation needs p > 0");
  constexpr double kUnreachable = -std::numeric_limits<double>::infinity();
  // best[j]: max over admissible partitions of [t_0, t_j] of sum |g|^p;
  // ties keep the candidate with fewer partition points.
  std::vector<double> best(n_points, kUnreachable);
  std::vector<std::size_t> points(n_points, 0);
  best[0] = 0.0;
  for (std::size_t j = 1; j < n_points; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (best[i] == kUnreachable) continue;
      if (mesh && mesh->control(i, j) > mesh->L) continue;
      const double cand = best[i] + std::pow(increment_norm(i, j), p);
      if (cand > best[j] || (cand == best[j] && points[i] + 1 < points[j])) {
        best[j] = cand;
        points[j] = points[i] + 1;
      }
    }
  }
  if (best[n_points - 1] == kUnreachable) return 0.0;
  return std::pow(best[n_points - 1], 1.0 / p);
}

double pvar_power_on_interval(const PairNorm& increment_norm, std::size_t lo, std::size_t hi,
                              double p) {
  if (hi <= lo) return 0.0;
  const std::size_t n = hi - lo + 1;
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + std::pow(increment_norm(lo + i, lo + j), p);
      if (cand > b) b = cand;
    }
    best[j] = b;
  }
  return best[n - 1];
}

GridControl pvar_control(const std::vector<double>& times, const PairNorm& increment_norm,
                         double p) {
  const std::size_t n = times.size();
  if (n < 2) throw InvalidGrid("control needs at least 2 grid points");
  std::vector<double> vals(n * (n + 1) / 2, 0.0);
  std::size_t at = 0;
  // forward DP from each anchor s; O(n^3) as the tables share prefixes
  std::vector<double> best(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = s; j < n; ++j) best[j] = 0.0;
    vals[at++] = 0.0;  // (s, s)
    for (std::size_t j = s + 1; j < n; ++j) {
      double b = 0.0;
      for (std::size_t i = s; i < j; ++i) {
        const double cand = best[i] + std::pow(increment_norm(i, j), p);
        if (cand > b) b = cand;
      }
      best[j] = b;
      vals[at++] = b;
    }
  }
  return GridControl(times, std::move(vals));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace roughns
