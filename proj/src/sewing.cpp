#include "roughns/sewing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "roughns/errors.hpp"

namespace roughns {

namespace {

bool power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

double default_norm(const Eigen::VectorXd& v) { return v.norm(); }

}  // namespace

Eigen::MatrixXd sewing_level_sums(const Germ& germ, int dim, const std::vector<double>& germ_times,
                                  int out_stride, int level) {
  const std::size_t steps = germ_times.size() - 1;
  const std::size_t level_stride = steps >> level;
  if (level_stride == 0 || steps % level_stride != 0 ||
      static_cast<std::size_t>(out_stride) % level_stride != 0) {
    throw InvalidGrid("level sums need the output points on the level partition");
  }
  const std::size_t n_out = steps / static_cast<std::size_t>(out_stride) + 1;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_out, dim);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
  for (std::size_t a = 0; a + level_stride <= steps; a += level_stride) {
    acc += germ(a, a + level_stride);
    const std::size_t end = a + level_stride;
    if (end % static_cast<std::size_t>(out_stride) == 0) {
      sums.row(end / static_cast<std::size_t>(out_stride)) = acc;
    }
  }
  return sums;
}

SewingResult sewing_integrate(const Germ& germ, int dim, double zeta, const ControlFn& omega,
                              const std::vector<double>& germ_times, int out_stride,
                              const NormFn& norm_in, double check_tol) {
  if (germ_times.size() < 2) throw InvalidGrid("sewing needs at least 2 grid points");
  const std::size_t steps = germ_times.size() - 1;
  if (!power_of_two(steps)) throw InvalidGrid("sewing germ grid must be dyadic");
  if (out_stride < 1 || steps % static_cast<std::size_t>(out_stride) != 0 ||
      !power_of_two(static_cast<std::size_t>(out_stride))) {
    throw InvalidGrid("output stride must be a dyadic divisor of the germ grid");
  }
  if (!(zeta >= 0.0 && zeta < 1.0)) throw InvalidGrid("sewing exponent zeta must lie in [0,1)");
  const NormFn norm = norm_in ? norm_in : NormFn(default_norm);

  int depth = 0;
  while ((std::size_t{1} << depth) < steps) ++depth;

  SewingResult result;
  result.times.reserve(steps / out_stride + 1);
  for (std::size_t i = 0; i <= steps; i += static_cast<std::size_t>(out_stride)) {
    result.times.push_back(germ_times[i]);
  }

  // precondition: |dh_{s,m,t}| <= omega(s,t)^{1/zeta} on every midpoint triple
  double worst_ratio = 0.0;
  double worst_violation = -1.0;
  std::array<std::size_t, 3> worst_triple{0, 0, 0};
  for (int level = 0; level < depth; ++level) {
    const std::size_t stride = steps >> level;
    for (std::size_t a = 0; a + stride <= steps; a += stride) {
      const std::size_t b = a + stride;
      const std::size_t m = a + stride / 2;
      const double defect = norm(germ(a, b) - germ(a, m) - germ(m, b));
      const double bound = zeta == 0.0 ? 0.0 : std::pow(omega(a, b), 1.0 / zeta);
      if (bound > 0.0) worst_ratio = std::max(worst_ratio, defect / bound);
      const double slack = defect - bound;
      if (slack > check_tol * (1.0 + bound) && slack > worst_violation) {
        worst_violation = slack;
        worst_triple = {a, m, b};
      }
    }
  }
  if (worst_violation >= 0.0) {
    std::ostringstream msg;
    msg << "germ defect exceeds omega^(1/zeta) at (s,m,t) = (" << germ_times[worst_triple[0]]
        << ", " << germ_times[worst_triple[1]] << ", " << germ_times[worst_triple[2]]
        << ") by " << worst_violation;
    throw NotSewable(msg.str());
  }
  result.precondition_ratio = worst_ratio;

  // finest dyadic Riemann sums at the output points
  Eigen::MatrixXd path = sewing_level_sums(germ, dim, germ_times, out_stride, depth);

  // Geometric tail of the level increments I^{(m+1)} - I^{(m)}. The ratio is
  // fitted on the full-interval sums (defined at every level); the per-point
  // correction direction comes from the last refinement, which covers all
  // output points as soon as the germ grid is strictly finer than the output
  // grid. Skipped when the increments do not decay geometrically.
  if (out_stride >= 2 && depth >= 3) {
    std::vector<Eigen::VectorXd> endpoint(depth + 1);
    for (int level = 0; level <= depth; ++level) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
      const std::size_t stride = steps >> level;
      for (std::size_t a = 0; a + stride <= steps; a += stride) acc += germ(a, a + stride);
      endpoint[level] = acc;
    }
    std::vector<double> mags(depth);
    for (int m = 0; m < depth; ++m) mags[m] = (endpoint[m + 1] - endpoint[m]).norm();
    const int last = depth - 1;
    if (mags[last] > 0.0 && mags[last - 1] > 0.0 && mags[last - 2] > 0.0) {
      const double q1 = mags[last] / mags[last - 1];
      const double q2 = mags[last - 1] / mags[last - 2];
      const double rho = 0.5 * (q1 + q2);
      const double spread = std::max(q1, q2) / std::min(q1, q2);
      const double align = (endpoint[last + 1] - endpoint[last])
                               .dot(endpoint[last] - endpoint[last - 1]) /
                           (mags[last] * mags[last - 1]);
      if (rho > 0.0 && rho < 0.95 && spread < 1.5 && align > 0.9) {
        const Eigen::MatrixXd prev = sewing_level_sums(germ, dim, germ_times, out_stride,
                                                       depth - 1);
        path += (path - prev) * (rho / (1.0 - rho));
        result.tail_extrapolated = true;
        result.tail_ratio = rho;
      }
    }
  }
  result.path = std::move(path);

  // residual |h - dI| over the dyadic pairs of the output grid
  const std::size_t n_out = result.times.size();
  const std::size_t out_steps = n_out - 1;
  for (std::size_t len = out_steps; len >= 1; len /= 2) {
    for (std::size_t a = 0; a + len <= out_steps; a += len) {
      const std::size_t b = a + len;
      const std::size_t ga = a * static_cast<std::size_t>(out_stride);
      const std::size_t gb = b * static_cast<std::size_t>(out_stride);
      const Eigen::VectorXd residual =
          germ(ga, gb) - (result.path.row(b) - result.path.row(a)).transpose();
      const double r = norm(residual);
      if (r > result.worst_residual) {
        result.worst_residual = r;
        result.worst_pair = {a, b};
      }
      const double bound = zeta == 0.0 ? 0.0 : std::pow(omega(ga, gb), 1.0 / zeta);
      if (bound > 0.0) result.observed_constant = std::max(result.observed_constant, r / bound);
    }
    if (len == 1) break;
  }
  return result;
}

}  // namespace roughns
