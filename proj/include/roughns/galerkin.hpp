#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "roughns/grid.hpp"
#include "roughns/spectral.hpp"

namespace roughns {

// Coefficient ODE of the Galerkin system on the divergence-free basis:
//   dc_i/dt = -sum_{j,l} B_{j,l,i} c_j c_l - nu lambda_i c_i
//             + sum_k zdot^k sum_j A_{k,j,i} c_j,
// with B_{j,l,i} = b(h_j, h_l, h_i) and A_{k,j,i} = ((sigma_k . grad) h_j, h_i).
// Sign convention: with sigma = 0 a single mode decays as c(t) = c(0) e^{-nu lambda t}.
struct GalerkinTensors {
  int M = 0;
  int K = 0;
  double nu = 0.0;
  Eigen::VectorXd lambda;
  std::vector<Eigen::MatrixXd> A;  // K matrices; A[k](i, j) = A_{k,j,i}
  std::vector<Eigen::MatrixXd> B;  // M matrices; B[i](j, l) = B_{j,l,i}

  Eigen::VectorXd convective(const Eigen::VectorXd& c) const;  // (B c c)_i
  Eigen::VectorXd rhs(const Eigen::VectorXd& c, const Eigen::VectorXd& zdot) const;

  // Largest assembly defect of the two antisymmetries B_{j,l,i} = -B_{j,i,l}
  // and A_{k,j,i} = -A_{k,i,j}.
  double antisymmetry_defect() const;
};

GalerkinTensors assemble_tensors(const ModeBasis& basis, const SigmaFamily& sigma, double nu);

// One RK4 step with the driver slope frozen over the substep (exact for
// piecewise-linear drivers). Throws NumericalBlowup when the state leaves
// |c|_inf <= blowup_threshold.
Eigen::VectorXd rk4_step(const Eigen::VectorXd& state, const Eigen::VectorXd& slope, double dt,
                         const GalerkinTensors& tensors, double t_for_report = 0.0,
                         double blowup_threshold = 1e6);

struct Trajectory {
  std::vector<double> times;        // all substep endpoints
  Eigen::MatrixXd states;           // (n_times x M)
  std::vector<double> energy;       // |u|_0^2 = sum c_i^2
  std::vector<double> dissipation;  // int_0^t |grad u|^2 dr (composite Simpson)
  int substeps_per_segment = 0;
  std::size_t segment_stride = 0;   // index stride between driver segment ends
  double nu = 0.0;

  std::size_t index_of_time(double t) const;  // exact grid lookup
  std::string to_csv() const;                 // t,c_1..c_M,energy,dissipation_integral
};

// Integrates across all driver segments. u0 must be divergence-free,
// mean-free and contained in the basis (BasisMismatch otherwise). The
// terminal balance |u_T|^2 + 2 nu int |grad u|^2 <= |u_0|^2 + energy_tol is
// enforced as a runtime check.
Trajectory run(const SpectralField& u0, const GridPath& driver, const GalerkinTensors& tensors,
               const ModeBasis& basis, int substeps_per_segment = 8, double energy_tol = 1e-6);

Trajectory run(const Eigen::VectorXd& c0, const GridPath& driver, const GalerkinTensors& tensors,
               int substeps_per_segment = 8, double energy_tol = 1e-6);

// Exact solution for constant sigma and Taylor-Green data:
//   u(t, x) = e^{-2 nu t} TG(x + sum_k sigma_k z^k_t),
// realized by rotating the two TG wavevector pairs by the phases n . shift.
// Throws OracleUnavailable for non-constant sigma.
SpectralField exact_oracle_shifted_tg(const SigmaFamily& sigma, const GridPath& z, double nu,
                                      double t);

}  // namespace roughns
