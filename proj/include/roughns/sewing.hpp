#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace roughns {

// Vector-valued two-index germ addressed by indices into the germ grid.
using Germ = std::function<Eigen::VectorXd(std::size_t, std::size_t)>;
using ControlFn = std::function<double(std::size_t, std::size_t)>;
using NormFn = std::function<double(const Eigen::VectorXd&)>;

struct SewingResult {
  std::vector<double> times;  // output grid
  Eigen::MatrixXd path;       // (n_out x dim), path.row(0) = 0

  // Observed residual Lambda h = h - dI over the checked pairs.
  double worst_residual = 0.0;
  double observed_constant = 0.0;  // sup |h - dI| / omega^{1/zeta}
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};

  // Precondition diagnostics: sup |dh_sut| / omega(s,t)^{1/zeta}.
  double precondition_ratio = 0.0;

  bool tail_extrapolated = false;
  double tail_ratio = 0.0;  // fitted geometric ratio of level increments
};

// Sewing integrator on a dyadic grid. The germ lives on a grid with
// 2^germ_depth steps; the returned path is tabulated on the coarser output
// grid with 2^out_depth steps (out_depth <= germ_depth). The construction is
// the dyadic refinement of Riemann sums
//     I^{(m)}_t = sum over level-m steps of [0,t] of h,
// compensated by a geometric tail estimate fitted to the level increments
// I^{(m+1)} - I^{(m)} (skipped automatically when the increments do not decay
// geometrically, e.g. for rough germs at their finest resolution).
//
// Precondition (checked, not assumed): |dh_{s,mid,t}| <= omega(s,t)^{1/zeta}
// on every midpoint triple of the dyadic tree, within check_tol; violation
// throws NotSewable reporting the worst triple. zeta in [0,1); zeta = 0
// demands exact increments (dh = 0 within check_tol).
SewingResult sewing_integrate(const Germ& germ, int dim, double zeta, const ControlFn& omega,
                              const std::vector<double>& germ_times, int out_stride,
                              const NormFn& norm = {}, double check_tol = 1e-8);

// Raw level-m Riemann sums at the output points (no tail compensation);
// exposes the partition-(in)dependence of the plain sums for diagnostics.
Eigen::MatrixXd sewing_level_sums(const Germ& germ, int dim, const std::vector<double>& germ_times,
                                  int out_stride, int level);

}  // namespace roughns
