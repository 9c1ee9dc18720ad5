#include "roughns/roughpath.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "roughns/csv.hpp"
#include "roughns/errors.hpp"
#include "roughns/rng.hpp"

namespace roughns {

RoughLift::RoughLift(GridPath path, std::vector<Eigen::MatrixXd> zz_prefix, double p)
    : path_(std::move(path)), zz_prefix_(std::move(zz_prefix)), p_(p) {
  path_.validate();
  if (zz_prefix_.size() != path_.size()) throw InvalidGrid("lift prefix/grid length mismatch");
}

Eigen::VectorXd RoughLift::Z(std::size_t i, std::size_t j) const {
  return path_.values.row(j) - path_.values.row(i);
}

Eigen::MatrixXd RoughLift::ZZ(std::size_t i, std::size_t j) const {
  // ZZ_{st} = ZZ_{0t} - ZZ_{0s} - Z_{0s} (x) Z_{st}  (Chen composition)
  const Eigen::VectorXd z0s = path_.values.row(i).transpose() - path_.values.row(0).transpose();
  Eigen::MatrixXd zz = zz_prefix_[j] - zz_prefix_[i] - z0s * Z(i, j).transpose();
  for (const auto& pert : perturbations_) {
    if (pert.i == i && pert.j == j) zz(pert.row, pert.col) += pert.eps;
  }
  return zz;
}

void RoughLift::perturb_zz(std::size_t i, std::size_t j, int row, int col, double eps) {
  perturbations_.push_back({i, j, row, col, eps});
}

double RoughLift::omega(std::size_t i, std::size_t j) const {
  auto z_norm = [this](std::size_t a, std::size_t b) { return Z(a, b).norm(); };
  auto zz_norm = [this](std::size_t a, std::size_t b) { return ZZ(a, b).norm(); };
  return pvar_power_on_interval(z_norm, i, j, p_) +
         pvar_power_on_interval(zz_norm, i, j, p_ / 2.0);
}

GridControl RoughLift::omega_control() const {
  auto z_norm = [this](std::size_t a, std::size_t b) { return Z(a, b).norm(); };
  auto zz_norm = [this](std::size_t a, std::size_t b) { return ZZ(a, b).norm(); };
  const GridControl z_part = pvar_control(path_.times, z_norm, p_);
  const GridControl zz_part = pvar_control(path_.times, zz_norm, p_ / 2.0);
  return GridControl::from_function(path_.times, [&](std::size_t a, std::size_t b) {
    return z_part(a, b) + zz_part(a, b);
  });
}

RoughLift lift_piecewise_linear(const GridPath& path, double p) {
  path.validate();
  if (!(p >= 2.0 && p < 3.0)) throw InvalidGrid("lift exponent must lie in [2,3)");
  const std::size_t n = path.size();
  const int K = path.channels();
  std::vector<Eigen::MatrixXd> prefix(n, Eigen::MatrixXd::Zero(K, K));
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const Eigen::VectorXd dz = path.values.row(m + 1) - path.values.row(m);
    const Eigen::VectorXd rel = path.values.row(m) - path.values.row(0);
    prefix[m + 1] = prefix[m] + rel * dz.transpose() + 0.5 * dz * dz.transpose();
  }
  return RoughLift(path, std::move(prefix), p);
}

double chen_defect(const RoughLift& lift) {
  const std::size_t n = lift.size();
  if (n < 3) throw InvalidGrid("Chen defect needs at least 3 grid points");
  double worst = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t u = s + 1; u < n; ++u) {
      const Eigen::MatrixXd zz_su = lift.ZZ(s, u);
      const Eigen::VectorXd z_su = lift.Z(s, u);
      for (std::size_t t = u + 1; t < n; ++t) {
        const Eigen::MatrixXd defect = lift.ZZ(s, t) - zz_su - lift.ZZ(u, t) -
                                       z_su * lift.Z(u, t).transpose();
        const double d = defect.cwiseAbs().maxCoeff();
        if (d > worst) worst = d;
      }
    }
  }
  return worst;
}

GridPath sample_gaussian_driver(DriverKind kind, double hurst, const std::vector<double>& times,
                                int channels, std::uint64_t seed) {
  if (times.size() < 2) throw InvalidGrid("driver grid needs at least 2 points");
  if (!is_uniform_grid(times)) throw InvalidGrid("gaussian drivers need a uniform grid");
  if (kind == DriverKind::Fbm && !(hurst > 1.0 / 3.0 && hurst <= 0.5)) {
    throw UnsupportedHurst("H must lie in (1/3, 1/2]");
  }
  const std::size_t steps = times.size() - 1;
  const double dt = times[1] - times[0];
  GaussianStream stream(split_seed(seed, /*purpose=*/0x6472767273616d70ULL));

  // normals consumed step-major, channel-minor, so fbm(1/2) and brownian
  // paths from the same seed coincide bit for bit
  Eigen::MatrixXd xi(steps, channels);
  for (std::size_t i = 0; i < steps; ++i) {
    for (int k = 0; k < channels; ++k) xi(i, k) = stream.normal();
  }

  Eigen::MatrixXd increments(steps, channels);
  if (kind == DriverKind::Brownian || hurst == 0.5) {
    increments = std::sqrt(dt) * xi;
  } else {
    // exact factorization of the fractional-Gaussian-noise covariance
    Eigen::MatrixXd cov(steps, steps);
    const double scale = std::pow(dt, 2.0 * hurst);
    for (std::size_t i = 0; i < steps; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double k = static_cast<double>(i - j);
        const double gamma = 0.5 * (std::pow(k + 1.0, 2.0 * hurst) +
                                    std::pow(std::abs(k - 1.0), 2.0 * hurst) -
                                    2.0 * std::pow(k, 2.0 * hurst));
        cov(i, j) = scale * gamma;
        cov(j, i) = cov(i, j);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw Error("fGn covariance factorization failed");
    increments = llt.matrixL() * xi;
  }

  GridPath path;
  path.times = times;
  path.values = Eigen::MatrixXd::Zero(times.size(), channels);
  for (std::size_t i = 0; i < steps; ++i) {
    path.values.row(i + 1) = path.values.row(i) + increments.row(i);
  }
  return path;
}

namespace {

// Dyadic interval pairs when n-1 is a power of two, otherwise consecutive
// pairs plus the full interval.
std::vector<std::pair<std::size_t, std::size_t>> audit_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t steps = n - 1;
  if ((steps & (steps - 1)) == 0) {
    for (std::size_t len = steps; len >= 1; len /= 2) {
      for (std::size_t s = 0; s + len <= steps; s += len) pairs.emplace_back(s, s + len);
      if (len == 1) break;
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    pairs.emplace_back(0, steps);
  }
  return pairs;
}

}  // namespace

MollifiedDriver mollify_driver(const GridPath& path, double delta, double p) {
  path.validate();
  if (!is_uniform_grid(path.times)) throw InvalidGrid("mollification needs a uniform source grid");
  const double h = path.times[1] - path.times[0];
  const double ratio = delta / h;
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
    if (ratio < 1.0) throw MeshTooFine("mesh " + std::to_string(delta) +
                                       " is below the source spacing " + std::to_string(h));
    throw InvalidGrid("mesh must be an integer multiple of the source spacing");
  }

  const std::size_t n = path.size();
  std::vector<std::size_t> node_idx;
  for (std::size_t i = 0; i < n; i += stride) node_idx.push_back(i);
  if (node_idx.back() != n - 1) node_idx.push_back(n - 1);

  GridPath nodes;
  nodes.times.reserve(node_idx.size());
  nodes.values = Eigen::MatrixXd(node_idx.size(), path.channels());
  for (std::size_t r = 0; r < node_idx.size(); ++r) {
    nodes.times.push_back(path.times[node_idx[r]]);
    nodes.values.row(r) = path.values.row(node_idx[r]);
  }

  GridPath fine;
  fine.times = path.times;
  fine.values = Eigen::MatrixXd(n, path.channels());
  for (std::size_t i = 0; i < n; ++i) fine.values.row(i) = nodes.at(path.times[i]);

  RoughLift lift = lift_piecewise_linear(fine, p);
  RoughLift source_lift = lift_piecewise_linear(path, p);

  double ratio_sup = 0.0;
  for (const auto& [s, t] : audit_pairs(n)) {
    const double denom = source_lift.omega(s, t);
    if (denom <= 0.0) continue;
    ratio_sup = std::max(ratio_sup, lift.omega(s, t) / denom);
  }
  return MollifiedDriver{std::move(nodes), std::move(fine), std::move(lift), ratio_sup};
}

std::string path_to_csv(const GridPath& path) {
  std::ostringstream out;
  out << "t";
  for (int k = 0; k < path.channels(); ++k) out << ",z" << (k + 1);
  out << "\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.times[i]);
    for (int k = 0; k < path.channels(); ++k) out << "," << format_double(path.values(i, k));
    out << "\n";
  }
  return out.str();
}

std::string lift_to_csv(const RoughLift& lift) {
  const int K = lift.channels();
  std::ostringstream out;
  out << "s,t";
  for (int k = 0; k < K; ++k) out << ",Z_" << (k + 1);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) out << ",ZZ_" << (i + 1) << (j + 1);
  }
  out << "\n";
  for (const auto& [s, t] : audit_pairs(lift.size())) {
    out << format_double(lift.path().times[s]) << "," << format_double(lift.path().times[t]);
    const Eigen::VectorXd z = lift.Z(s, t);
    for (int k = 0; k < K; ++k) out << "," << format_double(z(k));
    const Eigen::MatrixXd zz = lift.ZZ(s, t);
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < K; ++j) out << "," << format_double(zz(i, j));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace roughns
