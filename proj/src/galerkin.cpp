#include "roughns/galerkin.hpp"

#include <cmath>
#include <sstream>

#include "roughns/csv.hpp"
#include "roughns/errors.hpp"

namespace roughns {

Eigen::VectorXd GalerkinTensors::convective(const Eigen::VectorXd& c) const {
  Eigen::VectorXd out(M);
  for (int i = 0; i < M; ++i) out(i) = c.dot(B[i] * c);
  return out;
}

Eigen::VectorXd GalerkinTensors::rhs(const Eigen::VectorXd& c, const Eigen::VectorXd& zdot) const {
  Eigen::VectorXd out = -convective(c) - nu * lambda.cwiseProduct(c);
  for (int k = 0; k < K; ++k) {
    if (zdot(k) == 0.0) continue;
    out += zdot(k) * (A[k] * c);
  }
  return out;
}

double GalerkinTensors::antisymmetry_defect() const {
  double worst = 0.0;
  for (int k = 0; k < K; ++k) {
    worst = std::max(worst, (A[k] + A[k].transpose()).cwiseAbs().maxCoeff());
  }
  // B_{j,l,i} = -B_{j,i,l}: swapping the last two indices flips the sign
  for (int i = 0; i < M; ++i) {
    for (int l = 0; l < M; ++l) {
      for (int j = 0; j < M; ++j) {
        worst = std::max(worst, std::abs(B[i](j, l) + B[l](j, i)));
      }
    }
  }
  return worst;
}

GalerkinTensors assemble_tensors(const ModeBasis& basis, const SigmaFamily& sigma, double nu) {
  sigma.validate();
  GalerkinTensors tensors;
  tensors.M = static_cast<int>(basis.size());
  tensors.K = sigma.K();
  tensors.nu = nu;
  tensors.lambda = basis.eigenvalues();

  std::vector<SpectralField> fields;
  fields.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) fields.push_back(basis.field(i));

  tensors.A.reserve(sigma.K());
  for (int k = 0; k < sigma.K(); ++k) {
    Eigen::MatrixXd a(tensors.M, tensors.M);
    for (int j = 0; j < tensors.M; ++j) {
      const SpectralField image = advect(sigma.channels[k], fields[j]);
      for (int i = 0; i < tensors.M; ++i) a(i, j) = image.l2_inner(fields[i]);
    }
    tensors.A.push_back(std::move(a));
  }

  tensors.B.assign(tensors.M, Eigen::MatrixXd::Zero(tensors.M, tensors.M));
  for (int j = 0; j < tensors.M; ++j) {
    for (int l = 0; l < tensors.M; ++l) {
      const SpectralField conv = convect(fields[j], fields[l]);
      for (int i = 0; i < tensors.M; ++i) {
        const double v = conv.l2_inner(fields[i]);
        if (v != 0.0) tensors.B[i](j, l) = v;
      }
    }
  }
  return tensors;
}

Eigen::VectorXd rk4_step(const Eigen::VectorXd& state, const Eigen::VectorXd& slope, double dt,
                         const GalerkinTensors& tensors, double t_for_report,
                         double blowup_threshold) {
  const Eigen::VectorXd k1 = tensors.rhs(state, slope);
  const Eigen::VectorXd k2 = tensors.rhs(state + 0.5 * dt * k1, slope);
  const Eigen::VectorXd k3 = tensors.rhs(state + 0.5 * dt * k2, slope);
  const Eigen::VectorXd k4 = tensors.rhs(state + dt * k3, slope);
  Eigen::VectorXd next = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite() || next.cwiseAbs().maxCoeff() > blowup_threshold) {
    throw NumericalBlowup(t_for_report + dt, next.allFinite() ? next.norm() : INFINITY);
  }
  return next;
}

std::size_t Trajectory::index_of_time(double t) const {
  const double h = times.size() > 1 ? times[1] - times[0] : 1.0;
  const auto idx = static_cast<std::size_t>(std::llround(t / h));
  if (idx >= times.size() || std::abs(times[idx] - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw GridMismatch("time " + std::to_string(t) + " is not on the trajectory grid");
  }
  return idx;
}

std::string Trajectory::to_csv() const {
  std::ostringstream out;
  out << "t";
  for (Eigen::Index m = 0; m < states.cols(); ++m) out << ",c_" << (m + 1);
  out << ",energy,dissipation_integral\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_double(times[i]);
    for (Eigen::Index m = 0; m < states.cols(); ++m) out << "," << format_double(states(i, m));
    out << "," << format_double(energy[i]) << "," << format_double(dissipation[i]) << "\n";
  }
  return out.str();
}

Trajectory run(const Eigen::VectorXd& c0, const GridPath& driver, const GalerkinTensors& tensors,
               int substeps_per_segment, double energy_tol) {
  driver.validate();
  if (substeps_per_segment < 1) throw Error("substeps_per_segment must be positive");
  if (driver.channels() != tensors.K) {
    throw ChannelMismatch("driver channels do not match tensors");
  }
  const std::size_t segments = driver.size() - 1;
  const std::size_t n_times = segments * static_cast<std::size_t>(substeps_per_segment) + 1;

  Trajectory traj;
  traj.substeps_per_segment = substeps_per_segment;
  traj.segment_stride = static_cast<std::size_t>(substeps_per_segment);
  traj.nu = tensors.nu;
  traj.times.resize(n_times);
  traj.states.resize(n_times, tensors.M);
  traj.energy.resize(n_times);
  traj.dissipation.resize(n_times);

  Eigen::VectorXd c = c0;
  auto grad2 = [&](const Eigen::VectorXd& v) { return tensors.lambda.dot(v.cwiseProduct(v)); };

  std::size_t at = 0;
  traj.times[0] = driver.times[0];
  traj.states.row(0) = c.transpose();
  traj.energy[0] = c.squaredNorm();
  traj.dissipation[0] = 0.0;
  double prev_grad2 = grad2(c);
  double pair_start_grad2 = prev_grad2;  // value at the last even substep index
  double prev_dt = 0.0;

  for (std::size_t seg = 0; seg < segments; ++seg) {
    const double t0 = driver.times[seg];
    const double t1 = driver.times[seg + 1];
    const double dt = (t1 - t0) / substeps_per_segment;
    const Eigen::VectorXd slope =
        (driver.values.row(seg + 1) - driver.values.row(seg)).transpose() / (t1 - t0);
    for (int s = 0; s < substeps_per_segment; ++s) {
      const double t_here = t0 + s * dt;
      c = rk4_step(c, slope, dt, tensors, t_here);
      ++at;
      traj.times[at] = (s + 1 == substeps_per_segment) ? t1 : t0 + (s + 1) * dt;
      traj.states.row(at) = c.transpose();
      traj.energy[at] = c.squaredNorm();
      const double g2 = grad2(c);
      if (at % 2 == 0 && dt == prev_dt) {
        // composite Simpson over the completed substep pair
        traj.dissipation[at] =
            traj.dissipation[at - 2] + (dt / 3.0) * (pair_start_grad2 + 4.0 * prev_grad2 + g2);
        pair_start_grad2 = g2;
      } else {
        // odd endpoint (or unequal pair on a non-uniform grid): trapezoid
        // patch, overwritten once an equal-width pair completes
        traj.dissipation[at] = traj.dissipation[at - 1] + 0.5 * dt * (prev_grad2 + g2);
        if (at % 2 == 0) pair_start_grad2 = g2;
      }
      prev_grad2 = g2;
      prev_dt = dt;
    }
  }

  // terminal balance |u_T|^2 + 2 nu int_0^T |grad u|^2 <= |u_0|^2 + tol
  const double balance =
      traj.energy.back() + 2.0 * tensors.nu * traj.dissipation.back() - traj.energy.front();
  if (balance > energy_tol) {
    throw Error("energy balance violated by " + std::to_string(balance));
  }
  return traj;
}

Trajectory run(const SpectralField& u0, const GridPath& driver, const GalerkinTensors& tensors,
               const ModeBasis& basis, int substeps_per_segment, double energy_tol) {
  if (u0.has_mean_component(1e-14)) {
    throw BasisMismatch("initial datum has a mean component");
  }
  if (u0.divergence_defect() > 1e-12) {
    throw BasisMismatch("initial datum is not divergence-free");
  }
  if (basis.projection_defect(u0) > 1e-12) {
    throw BasisMismatch("initial datum has modes outside the basis");
  }
  return run(basis.project(u0), driver, tensors, substeps_per_segment, energy_tol);
}

SpectralField exact_oracle_shifted_tg(const SigmaFamily& sigma, const GridPath& z, double nu,
                                      double t) {
  if (!sigma.all_constant()) {
    throw OracleUnavailable("shifted Taylor-Green oracle needs constant sigma");
  }
  const Eigen::VectorXd zt = z.at(t);
  double shift_x = 0.0, shift_y = 0.0;
  for (int k = 0; k < sigma.K(); ++k) {
    shift_x += sigma.channels[k].vec[0] * zt(k);
    shift_y += sigma.channels[k].vec[1] * zt(k);
  }
  const double decay = std::exp(-2.0 * nu * t);

  // TG(x + a): each wavevector pair rotates by the phase n . a
  SpectralField u(2);
  const double amp = decay * (6.283185307179586476925286766559 / 2.0) / std::sqrt(2.0);
  struct TgMode {
    Wavevector n;
    double cx, cy;
  };
  const TgMode modes[2] = {{Wavevector{1, 1, 0}, 1.0, -1.0}, {Wavevector{1, -1, 0}, -1.0, -1.0}};
  for (const TgMode& mode : modes) {
    const double phase = mode.n[0] * shift_x + mode.n[1] * shift_y;
    const double cs = std::cos(phase);
    const double sn = std::sin(phase);
    // sin(n.x + phase) = cos(phase) sin(n.x) + sin(phase) cos(n.x)
    u.add(mode.n, Parity::Sin, 0, amp * cs * mode.cx);
    u.add(mode.n, Parity::Sin, 1, amp * cs * mode.cy);
    u.add(mode.n, Parity::Cos, 0, amp * sn * mode.cx);
    u.add(mode.n, Parity::Cos, 1, amp * sn * mode.cy);
  }
  u.set_divfree_flag(true);
  return u;
}

}  // namespace roughns
