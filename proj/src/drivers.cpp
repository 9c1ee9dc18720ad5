#include "roughns/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "roughns/csv.hpp"
#include "roughns/errors.hpp"

namespace roughns {

namespace {

// ((sigma_k . grad) of column basis functions, paired against row basis
// functions in L2. Projections are realized by the pairing itself: rows from
// the divergence-free basis give P rows, rows from the gradient basis Q rows.
Eigen::MatrixXd advection_matrix(const SigmaChannel& sigma, const ModeBasis& rows,
                                 const ModeBasis& cols) {
  Eigen::MatrixXd m(rows.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const SpectralField image = advect(sigma, cols.field(j));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const BasisFunction& r = rows[i];
      double dot = 0.0;
      for (int c = 0; c < rows.dimension(); ++c) {
        dot += r.direction[c] * image.coefficient(r.n, r.parity, c);
      }
      m(i, j) = dot;
    }
  }
  return m;
}

}  // namespace

DriverAssembly::DriverAssembly(SigmaFamily sigma, ModeBasis divfree, ModeBasis gradient,
                               const RoughLift* lift)
    : sigma_(std::move(sigma)), divfree_(std::move(divfree)), gradient_(std::move(gradient)),
      lift_(lift) {
  if (sigma_.K() != lift_->channels()) {
    throw ChannelMismatch("sigma has " + std::to_string(sigma_.K()) + " channels, lift has " +
                          std::to_string(lift_->channels()));
  }
  sigma_.validate();
  const std::size_t M = divfree_.size();
  const std::size_t G = gradient_.size();
  const int K = sigma_.K();
  mp_.reserve(K);
  mq_.reserve(K);
  full_.reserve(K);
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXd pp = advection_matrix(sigma_.channels[k], divfree_, divfree_);
    const Eigen::MatrixXd qp = advection_matrix(sigma_.channels[k], gradient_, divfree_);
    const Eigen::MatrixXd pq = advection_matrix(sigma_.channels[k], divfree_, gradient_);
    const Eigen::MatrixXd qq = advection_matrix(sigma_.channels[k], gradient_, gradient_);
    mp_.push_back(pp);
    mq_.push_back(qp);
    Eigen::MatrixXd full(M + G, M + G);
    full.topLeftCorner(M, M) = pp;
    full.bottomLeftCorner(G, M) = qp;
    full.topRightCorner(M, G) = pq;
    full.bottomRightCorner(G, G) = qq;
    full_.push_back(std::move(full));
  }
  // second-level blocks: AP2 = sum_{i,k} MP_k MP_i ZZ^{i,k}, etc.
  cpp_.resize(static_cast<std::size_t>(K) * K);
  cqp_.resize(static_cast<std::size_t>(K) * K);
  cff_.resize(static_cast<std::size_t>(K) * K);
  const Eigen::MatrixXd proj = leray_matrix();
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < K; ++i) {
      cpp_[k * K + i] = mp_[k] * mp_[i];
      cqp_[k * K + i] = mq_[k] * mp_[i];
      cff_[k * K + i] = full_[k] * proj * full_[i];
    }
  }
}

Eigen::MatrixXd DriverAssembly::leray_matrix() const {
  const std::size_t M = divfree_.size();
  const std::size_t G = gradient_.size();
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(M + G, M + G);
  proj.topLeftCorner(M, M).setIdentity();
  return proj;
}

Eigen::MatrixXd DriverAssembly::ap1(std::size_t s, std::size_t t) const {
  const Eigen::VectorXd z = lift_->Z(s, t);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M(), M());
  for (int k = 0; k < K(); ++k) out += z(k) * mp_[k];
  return out;
}

Eigen::MatrixXd DriverAssembly::aq1(std::size_t s, std::size_t t) const {
  const Eigen::VectorXd z = lift_->Z(s, t);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(G(), M());
  for (int k = 0; k < K(); ++k) out += z(k) * mq_[k];
  return out;
}

Eigen::MatrixXd DriverAssembly::a1(std::size_t s, std::size_t t) const {
  const Eigen::VectorXd z = lift_->Z(s, t);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M() + G(), M() + G());
  for (int k = 0; k < K(); ++k) out += z(k) * full_[k];
  return out;
}

Eigen::MatrixXd DriverAssembly::ap2(std::size_t s, std::size_t t) const {
  const Eigen::MatrixXd zz = lift_->ZZ(s, t);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M(), M());
  for (int k = 0; k < K(); ++k) {
    for (int i = 0; i < K(); ++i) out += zz(i, k) * cpp_[k * K() + i];
  }
  return out;
}

Eigen::MatrixXd DriverAssembly::aq2(std::size_t s, std::size_t t) const {
  const Eigen::MatrixXd zz = lift_->ZZ(s, t);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(G(), M());
  for (int k = 0; k < K(); ++k) {
    for (int i = 0; i < K(); ++i) out += zz(i, k) * cqp_[k * K() + i];
  }
  return out;
}

Eigen::MatrixXd DriverAssembly::a2(std::size_t s, std::size_t t) const {
  const Eigen::MatrixXd zz = lift_->ZZ(s, t);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M() + G(), M() + G());
  for (int k = 0; k < K(); ++k) {
    for (int i = 0; i < K(); ++i) out += zz(i, k) * cff_[k * K() + i];
  }
  return out;
}

Eigen::VectorXd DriverAssembly::apply_ap1(std::size_t s, std::size_t t,
                                          const Eigen::VectorXd& c) const {
  const Eigen::VectorXd z = lift_->Z(s, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(M());
  for (int k = 0; k < K(); ++k) out += z(k) * (mp_[k] * c);
  return out;
}

Eigen::VectorXd DriverAssembly::apply_aq1(std::size_t s, std::size_t t,
                                          const Eigen::VectorXd& c) const {
  const Eigen::VectorXd z = lift_->Z(s, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(G());
  for (int k = 0; k < K(); ++k) out += z(k) * (mq_[k] * c);
  return out;
}

Eigen::VectorXd DriverAssembly::apply_ap2(std::size_t s, std::size_t t,
                                          const Eigen::VectorXd& c) const {
  const Eigen::MatrixXd zz = lift_->ZZ(s, t);
  std::vector<Eigen::VectorXd> inner(K());
  for (int i = 0; i < K(); ++i) inner[i] = mp_[i] * c;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(M());
  for (int k = 0; k < K(); ++k) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(M());
    for (int i = 0; i < K(); ++i) mix += zz(i, k) * inner[i];
    out += mp_[k] * mix;
  }
  return out;
}

Eigen::VectorXd DriverAssembly::apply_aq2(std::size_t s, std::size_t t,
                                          const Eigen::VectorXd& c) const {
  const Eigen::MatrixXd zz = lift_->ZZ(s, t);
  std::vector<Eigen::VectorXd> inner(K());
  for (int i = 0; i < K(); ++i) inner[i] = mp_[i] * c;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(G());
  for (int k = 0; k < K(); ++k) {
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(M());
    for (int i = 0; i < K(); ++i) mix += zz(i, k) * inner[i];
    out += mq_[k] * mix;
  }
  return out;
}

std::string DriverAssembly::matrices_csv(const std::string& which) const {
  const std::size_t n = lift_->size();
  const std::size_t steps = n - 1;
  std::ostringstream out;
  out << "s,t,i,j,value\n";
  auto emit = [&](std::size_t s, std::size_t t) {
    Eigen::MatrixXd m;
    if (which == "ap1") m = ap1(s, t);
    else if (which == "ap2") m = ap2(s, t);
    else if (which == "aq1") m = aq1(s, t);
    else if (which == "aq2") m = aq2(s, t);
    else if (which == "a1") m = a1(s, t);
    else if (which == "a2") m = a2(s, t);
    else throw Error("unknown driver matrix name: " + which);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(i, j) == 0.0) continue;
        out << format_double(lift_->path().times[s]) << "," << format_double(lift_->path().times[t])
            << "," << i << "," << j << "," << format_double(m(i, j)) << "\n";
      }
    }
  };
  if ((steps & (steps - 1)) == 0) {
    for (std::size_t len = steps; len >= 1; len /= 2) {
      for (std::size_t s = 0; s + len <= steps; s += len) emit(s, s + len);
      if (len == 1) break;
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) emit(i, i + 1);
    emit(0, steps);
  }
  return out.str();
}

double ChenReport::max() const { return std::max({defect_p, defect_q, defect_full}); }

ChenReport chen_check(const DriverAssembly& drivers, double floor) {
  const RoughLift& lift = drivers.lift();
  const std::size_t n = lift.size();
  if (n < 3) throw InvalidGrid("Chen check needs at least 3 grid points");
  const int K = drivers.K();

  // max |entry| of each second-level block, for the bilinear screening bound
  std::vector<double> cpp_max(K * K), cqp_max(K * K), cff_max(K * K);
  {
    const Eigen::MatrixXd proj = drivers.leray_matrix();
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < K; ++i) {
        cpp_max[k * K + i] = (drivers.MP(k) * drivers.MP(i)).cwiseAbs().maxCoeff();
        cqp_max[k * K + i] = (drivers.MQ(k) * drivers.MP(i)).cwiseAbs().maxCoeff();
        cff_max[k * K + i] =
            (drivers.Full(k) * proj * drivers.Full(i)).cwiseAbs().maxCoeff();
      }
    }
  }

  ChenReport report;
  auto exact_defects = [&](std::size_t s, std::size_t u, std::size_t t) {
    const Eigen::MatrixXd dp = drivers.ap2(s, t) - drivers.ap2(s, u) - drivers.ap2(u, t) -
                               drivers.ap1(u, t) * drivers.ap1(s, u);
    const Eigen::MatrixXd dq = drivers.aq2(s, t) - drivers.aq2(s, u) - drivers.aq2(u, t) -
                               drivers.aq1(u, t) * drivers.ap1(s, u);
    const Eigen::MatrixXd df = drivers.a2(s, t) - drivers.a2(s, u) - drivers.a2(u, t) -
                               drivers.a1(u, t) * drivers.leray_matrix() * drivers.a1(s, u);
    report.defect_p = std::max(report.defect_p, dp.cwiseAbs().maxCoeff());
    report.defect_q = std::max(report.defect_q, dq.cwiseAbs().maxCoeff());
    report.defect_full = std::max(report.defect_full, df.cwiseAbs().maxCoeff());
  };

  // Screen every triple through the lift-level Chen defect; the driver
  // defects are the same bilinear data contracted against fixed matrices, so
  // a bound below `floor` certifies the triple. Flagged triples (and the
  // worst screened one) are recomputed from the assembled matrices.
  double worst_bound = 0.0;
  std::size_t flagged = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t u = s + 1; u < n; ++u) {
      const Eigen::MatrixXd zz_su = lift.ZZ(s, u);
      const Eigen::VectorXd z_su = lift.Z(s, u);
      for (std::size_t t = u + 1; t < n; ++t) {
        const Eigen::MatrixXd v = lift.ZZ(s, t) - zz_su - lift.ZZ(u, t) -
                                  z_su * lift.Z(u, t).transpose();
        const double lift_defect = v.cwiseAbs().maxCoeff();
        report.lift_defect = std::max(report.lift_defect, lift_defect);
        double bound = 0.0;
        for (int k = 0; k < K; ++k) {
          for (int i = 0; i < K; ++i) {
            const double vi = std::abs(v(i, k));
            bound += vi * std::max({cpp_max[k * K + i], cqp_max[k * K + i], cff_max[k * K + i]});
          }
        }
        if (bound > worst_bound) {
          worst_bound = bound;
          report.worst_triple = {s, u, t};
        }
        if (bound > floor && flagged < 256) {
          ++flagged;
          exact_defects(s, u, t);
        }
      }
    }
  }
  exact_defects(report.worst_triple[0], report.worst_triple[1], report.worst_triple[2]);

  // decimated direct pass, end to end through the public evaluators
  const std::size_t stride = std::max<std::size_t>(1, (n - 1) / 16);
  std::vector<std::size_t> coarse;
  for (std::size_t i = 0; i < n; i += stride) coarse.push_back(i);
  if (coarse.back() != n - 1) coarse.push_back(n - 1);
  for (std::size_t a = 0; a < coarse.size(); ++a) {
    for (std::size_t b = a + 1; b < coarse.size(); ++b) {
      for (std::size_t c = b + 1; c < coarse.size(); ++c) {
        exact_defects(coarse[a], coarse[b], coarse[c]);
      }
    }
  }
  return report;
}

double weighted_operator_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& lambda_out,
                              double alpha_out, const Eigen::VectorXd& lambda_in, double alpha_in) {
  // |A|_{H^in -> H^out} = sigma_max( W_out A W_in^{-1} ), diagonal weights
  // (1 + lambda)^{alpha/2}; power iteration on B^T B with fixed start.
  Eigen::MatrixXd B = A;
  for (Eigen::Index i = 0; i < B.rows(); ++i) B.row(i) *= std::pow(1.0 + lambda_out(i), 0.5 * alpha_out);
  for (Eigen::Index j = 0; j < B.cols(); ++j) B.col(j) *= std::pow(1.0 + lambda_in(j), -0.5 * alpha_in);
  const Eigen::MatrixXd gram = B.transpose() * B;
  Eigen::VectorXd v(gram.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i);
  v.normalize();
  double eig = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::VectorXd w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = w.dot(gram * w);
    if (iter > 3 && std::abs(next - eig) <= 1e-13 * std::max(1.0, std::abs(next))) {
      eig = next;
      break;
    }
    eig = next;
    v = w;
  }
  return std::sqrt(std::max(0.0, eig));
}

ControlBoundReport control_bound_check(const DriverAssembly& drivers, double p,
                                       const GridControl* omega_in) {
  const RoughLift& lift = drivers.lift();
  const std::size_t n = lift.size();
  const Eigen::VectorXd lambda = drivers.divfree_basis().eigenvalues();

  ControlBoundReport report;
  report.alpha1 = {0.0, 1.0, 2.0};
  report.alpha2 = {0.0, 1.0};
  report.sup_ratio1.assign(report.alpha1.size(), 0.0);
  report.sup_ratio2.assign(report.alpha2.size(), 0.0);

  const double max_n = drivers.divfree_basis().size() == 0
                           ? 0.0
                           : std::sqrt(lambda.maxCoeff());
  report.default_C = std::pow(1.0 + drivers.sigma().n0() * max_n, p);

  GridControl fallback = omega_in == nullptr
                             ? lift.omega_control().scaled(report.default_C)
                             : GridControl();
  const GridControl& omega = omega_in == nullptr ? fallback : *omega_in;

  const std::size_t steps = n - 1;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if ((steps & (steps - 1)) == 0) {
    for (std::size_t len = steps; len >= 1; len /= 2) {
      for (std::size_t s = 0; s + len <= steps; s += len) pairs.emplace_back(s, s + len);
      if (len == 1) break;
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    pairs.emplace_back(0, steps);
  }

  for (const auto& [s, t] : pairs) {
    const double w = omega(s, t);
    if (w <= 0.0) continue;
    const Eigen::MatrixXd m1 = drivers.ap1(s, t);
    for (std::size_t a = 0; a < report.alpha1.size(); ++a) {
      const double alpha = report.alpha1[a];
      const double norm = weighted_operator_norm(m1, lambda, -(alpha + 1.0), lambda, -alpha);
      report.sup_ratio1[a] = std::max(report.sup_ratio1[a], std::pow(norm, p) / w);
    }
    const Eigen::MatrixXd m2 = drivers.ap2(s, t);
    for (std::size_t a = 0; a < report.alpha2.size(); ++a) {
      const double alpha = report.alpha2[a];
      const double norm = weighted_operator_norm(m2, lambda, -(alpha + 2.0), lambda, -alpha);
      report.sup_ratio2[a] = std::max(report.sup_ratio2[a], std::pow(norm, 0.5 * p) / w);
    }
  }
  for (double r : report.sup_ratio1) report.fitted_constant = std::max(report.fitted_constant, r);
  for (double r : report.sup_ratio2) report.fitted_constant = std::max(report.fitted_constant, r);
  return report;
}

}  // namespace roughns
