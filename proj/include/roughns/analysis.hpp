#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "roughns/drivers.hpp"
#include "roughns/galerkin.hpp"
#include "roughns/pvariation.hpp"
#include "roughns/sewing.hpp"

namespace roughns {

// Cumulative quadrature of trajectory functionals on the substep grid
// (composite Simpson over substep pairs; scan points sit on even indices,
// odd indices get a trapezoid patch). All two-index integrals downstream are
// prefix differences, so they are additive to the bit.
struct QuadPrefix {
  std::vector<double> times;
  Eigen::MatrixXd drift;     // prefix of  nu Lambda c + Bvec(c)      (n x M)
  Eigen::MatrixXd bq;        // prefix of  B_Q(u) gradient coefficients (n x G)
  std::vector<double> omega_mu;  // prefix of (1 + |u|_1)^2
  std::vector<double> grad2;     // prefix of |grad u|^2
};
QuadPrefix quadrature_prefix(const Trajectory& traj, const GalerkinTensors& tensors,
                             const ModeBasis& divfree, const ModeBasis& gradient);

// Weighted dual norm on the band-limited test scale:
// |F|_{-alpha} = sqrt( sum_m (1 + lambda_m)^{-alpha} F(h_m)^2 ).
double dual_norm(const Eigen::VectorXd& values, const Eigen::VectorXd& lambda, double alpha);

// delta mu_{st}(phi_m) for every basis test function, plus the control
// omega_mu(s,t) = int_s^t (1 + |u_r|_1)^2 dr on the scan grid. The result
// borrows the prefix, which must outlive it.
struct MuResult {
  std::vector<double> scan_times;
  std::vector<std::size_t> scan_indices;  // into traj.times
  GridControl omega_mu;
  Eigen::VectorXd delta_mu(std::size_t i, std::size_t j) const;  // scan-grid indices
  const QuadPrefix* prefix = nullptr;
};
MuResult compute_mu(const Trajectory& traj, const QuadPrefix& prefix, int scan_depth);

struct PressurePath {
  std::vector<double> times;  // scan grid
  Eigen::MatrixXd pi;         // (n x G) gradient-basis coefficients, pi_0 = 0
  double sewing_residual = 0.0;
  double sewing_constant = 0.0;
  bool sewed = false;  // false when AQ vanishes identically (constant sigma)
};

// pi_t = -int_0^t B_Q(u) dr + I_t with I sewn from the germ
// h_{st} = AQ1_{st} u_s + AQ2_{st} u_s  (identically zero for constant sigma).
PressurePath recover_pressure(const Trajectory& traj, const DriverAssembly& drivers,
                              const QuadPrefix& prefix, int scan_depth, double p);

struct RemainderScan {
  std::vector<int> levels;
  std::vector<double> dt;
  std::vector<double> sup_uPnat;   // |u^{P,nat}_{st}|_{-3}
  std::vector<double> sup_uQnat;   // |u^{Q,nat}_{st}|_{-3, perp}
  std::vector<double> sup_usharp;  // |u^sharp_{st}|_{-2}
  std::vector<double> sup_du;      // |du_{st}|_{-1}
  LineFit slope_uPnat, slope_uQnat, slope_usharp, slope_du;
  std::vector<int> fitted_levels;  // after dropping quadrature-dominated tail

  std::string to_csv() const;      // level,dt,sup_uPnat,sup_uQnat,sup_usharp,sup_du
  std::string slopes_csv() const;  // quantity,slope,intercept,r2
};

// Remainders of the two-component formulation on every dyadic pair of the
// scan grid, with log2-log2 slopes fitted over levels [fit_lo, fit_hi].
// A control trajectory (same config, sigma = 0) marks levels where
// quadrature error dominates; up to two finest fitted levels are dropped.
RemainderScan compute_remainders(const Trajectory& traj, const DriverAssembly& drivers,
                                 const GalerkinTensors& tensors, int scan_depth, double p,
                                 int fit_lo = 3, int fit_hi = 8,
                                 const Trajectory* sigma_zero_control = nullptr);

// Local q-variation of a two-index map with the partition mesh restricted by
// varpi <= L, plus the unrestricted value.
struct VariationScanResult {
  double local = 0.0;
  double unrestricted = 0.0;
};
VariationScanResult variation_scan(const PairNorm& increment_norm, std::size_t n_points, double q,
                                   const PairNorm& varpi, double L);

// Max over recorded times of | |u_t|^2 + 2 nu int_0^t |grad u|^2 - |u_0|^2 |.
struct EnergyDefect {
  double max_defect = 0.0;
  double argmax_time = 0.0;
};
EnergyDefect energy_defect(const Trajectory& traj);

// Difference bookkeeping for two runs of the same driver and tensors.
struct GronwallReport {
  double v0_norm2 = 0.0;
  double terminal_lhs = 0.0;        // |v_T|^2 + int |grad v|^2
  double fitted_C = 0.0;            // lhs(t) <= C |v_0|^2 exp(c G(t))
  double fitted_c = 0.0;
  double growth_integral = 0.0;     // G(T) = int |u^1|_0^2 |u^1|_1^2 dr
};
GronwallReport gronwall_check(const Trajectory& a, const Trajectory& b,
                              const Eigen::VectorXd& lambda);

// Single-equation remainder of the combined formulation, evaluated against
// the joint (divergence-free + gradient) test band:
//   u^nat_{st}(phi) = du_{st}(phi) + int_s^t [nu (grad u, grad phi) + B(u)(phi)] dr
//                     - u_s([A1* + A2*] phi) + dpi_{st}(phi).
// Returns sup over scan pairs of | u^nat - (u^{P,nat} + u^{Q,nat}) | entrywise.
double formulation_equivalence_defect(const Trajectory& traj, const DriverAssembly& drivers,
                                      const GalerkinTensors& tensors, int scan_depth, double p);

}  // namespace roughns
