#include "roughns/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roughns/csv.hpp"
#include "roughns/errors.hpp"

namespace roughns {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

int norm2(const Wavevector& n) { return n[0] * n[0] + n[1] * n[1] + n[2] * n[2]; }

bool is_canonical(const Wavevector& n) {
  for (int c : n) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return false;  // n == 0
}

std::pair<Wavevector, int> canonicalize(const Wavevector& n) {
  if (is_canonical(n) || norm2(n) == 0) return {n, 1};
  return {Wavevector{-n[0], -n[1], -n[2]}, -1};
}

bool ModeKey::operator<(const ModeKey& o) const {
  if (n != o.n) return n < o.n;
  return parity < o.parity;
}

SpectralField::SpectralField(int d) : d_(d) {
  if (d != 2 && d != 3) throw Error("field dimension must be 2 or 3");
}

void SpectralField::add(const Wavevector& n_in, Parity parity, int component, double value) {
  if (value == 0.0) return;
  auto [n, sign] = canonicalize(n_in);
  if (norm2(n) == 0) {
    if (parity == Parity::Sin) return;  // sin(0) == 0
  } else if (parity == Parity::Sin) {
    value *= sign;
  }
  ModeKey key{n, norm2(n) == 0 ? Parity::Cos : parity};
  auto& coeff = coeffs_[key];
  coeff[component] += value;
}

double SpectralField::coefficient(const Wavevector& n_in, Parity parity, int component) const {
  auto [n, sign] = canonicalize(n_in);
  const auto it = coeffs_.find(ModeKey{n, norm2(n) == 0 ? Parity::Cos : parity});
  if (it == coeffs_.end()) return 0.0;
  const double v = it->second[component];
  return (parity == Parity::Sin && norm2(n) != 0) ? sign * v : v;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  for (const auto& [key, coeff] : other.coeffs_) {
    auto& mine = coeffs_[key];
    for (int c = 0; c < 3; ++c) mine[c] += coeff[c];
  }
  divfree_ = divfree_ && other.divfree_;
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& [key, coeff] : coeffs_) {
    for (double& v : coeff) v *= factor;
  }
  return *this;
}

SpectralField operator-(SpectralField a, const SpectralField& b) {
  SpectralField neg = b;
  neg *= -1.0;
  return a += neg;
}

double SpectralField::l2_inner(const SpectralField& other) const {
  double sum = 0.0;
  const auto& small = coeffs_.size() <= other.coeffs_.size() ? coeffs_ : other.coeffs_;
  const auto& big = coeffs_.size() <= other.coeffs_.size() ? other.coeffs_ : coeffs_;
  for (const auto& [key, coeff] : small) {
    const auto it = big.find(key);
    if (it == big.end()) continue;
    for (int c = 0; c < 3; ++c) sum += coeff[c] * it->second[c];
  }
  return sum;
}

double SpectralField::max_wavenumber() const {
  double m = 0.0;
  for (const auto& [key, coeff] : coeffs_) m = std::max(m, std::sqrt(double(norm2(key.n))));
  return m;
}

bool SpectralField::has_mean_component(double tol) const {
  const auto it = coeffs_.find(ModeKey{Wavevector{0, 0, 0}, Parity::Cos});
  if (it == coeffs_.end()) return false;
  for (int c = 0; c < d_; ++c) {
    if (std::abs(it->second[c]) > tol) return true;
  }
  return false;
}

double SpectralField::divergence_defect() const {
  double worst = 0.0;
  for (const auto& [key, coeff] : coeffs_) {
    double dot = 0.0;
    for (int c = 0; c < d_; ++c) dot += key.n[c] * coeff[c];
    worst = std::max(worst, std::abs(dot));
  }
  return worst;
}

Eigen::VectorXd SpectralField::evaluate(const Eigen::VectorXd& x) const {
  const double scale = std::sqrt(2.0) / std::pow(kTwoPi, 0.5 * d_);
  const double mean_scale = 1.0 / std::pow(kTwoPi, 0.5 * d_);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
  for (const auto& [key, coeff] : coeffs_) {
    double phase = 0.0;
    for (int c = 0; c < d_; ++c) phase += key.n[c] * x(c);
    double basis;
    if (norm2(key.n) == 0) {
      basis = mean_scale;
    } else {
      basis = scale * (key.parity == Parity::Sin ? std::sin(phase) : std::cos(phase));
    }
    for (int c = 0; c < d_; ++c) out(c) += coeff[c] * basis;
  }
  return out;
}

void SpectralField::prune(double tol) {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    bool live = false;
    for (int c = 0; c < 3; ++c) {
      if (std::abs(it->second[c]) > tol) live = true;
    }
    it = live ? std::next(it) : coeffs_.erase(it);
  }
}

double sobolev_norm(const SpectralField& f, double alpha) {
  double sum = 0.0;
  for (const auto& [key, coeff] : f.modes()) {
    const double weight = std::pow(1.0 + norm2(key.n), alpha);
    for (int c = 0; c < f.dimension(); ++c) sum += weight * coeff[c] * coeff[c];
  }
  return std::sqrt(sum);
}

LeraySplit leray_project(const SpectralField& f) {
  LeraySplit split{SpectralField(f.dimension()), SpectralField(f.dimension())};
  for (const auto& [key, coeff] : f.modes()) {
    const int nn = norm2(key.n);
    if (nn == 0) {
      // mean flow belongs to the divergence-free part
      for (int c = 0; c < f.dimension(); ++c) split.P.add(key.n, key.parity, c, coeff[c]);
      continue;
    }
    double dot = 0.0;
    for (int c = 0; c < f.dimension(); ++c) dot += key.n[c] * coeff[c];
    const double factor = dot / nn;
    for (int c = 0; c < f.dimension(); ++c) {
      const double q = factor * key.n[c];
      if (q != 0.0) split.Q.add(key.n, key.parity, c, q);
      const double pv = coeff[c] - q;
      if (pv != 0.0) split.P.add(key.n, key.parity, c, pv);
    }
  }
  split.P.set_divfree_flag(true);
  split.P.prune();
  split.Q.prune();
  return split;
}

SpectralField smoothing_apply(const SpectralField& f, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error("smoothing parameter must lie in (0, 1]");
  const auto cut = static_cast<int>(std::floor(1.0 / eta));
  SpectralField out(f.dimension());
  for (const auto& [key, coeff] : f.modes()) {
    if (norm2(key.n) >= cut * cut) continue;
    for (int c = 0; c < f.dimension(); ++c) out.add(key.n, key.parity, c, coeff[c]);
  }
  out.set_divfree_flag(f.divfree_flag());
  return out;
}

SpectralField derivative(const SpectralField& f, int axis) {
  SpectralField out(f.dimension());
  for (const auto& [key, coeff] : f.modes()) {
    const double factor = key.n[axis];
    if (factor == 0.0) continue;
    // d/dx sin(n.x) = n cos(n.x), d/dx cos(n.x) = -n sin(n.x); the sqrt(2)
    // normalizer is shared, so coefficients just swap parity with the factor.
    const Parity target = key.parity == Parity::Sin ? Parity::Cos : Parity::Sin;
    const double sign = key.parity == Parity::Sin ? 1.0 : -1.0;
    for (int c = 0; c < f.dimension(); ++c) {
      out.add(key.n, target, c, sign * factor * coeff[c]);
    }
  }
  return out;
}

namespace {

// Accumulate the product of two orthonormal scalar modes into `out` for one
// component slot, working through the product-to-sum identities. `a` and `b`
// are coefficients against the orthonormal scalars.
void accumulate_scalar_product(SpectralField& out, int component, const Wavevector& n, Parity pn,
                               double a, const Wavevector& m, Parity pm, double b, int d) {
  if (a == 0.0 || b == 0.0) return;
  const double root_vol = std::pow(kTwoPi, 0.5 * d);
  const bool n_zero = norm2(n) == 0;
  const bool m_zero = norm2(m) == 0;
  // unnormalized trig amplitudes
  const double ua = a * (n_zero ? 1.0 / root_vol : std::sqrt(2.0) / root_vol);
  const double ub = b * (m_zero ? 1.0 / root_vol : std::sqrt(2.0) / root_vol);

  auto emit = [&](const Wavevector& w, Parity parity, double amplitude) {
    if (amplitude == 0.0) return;
    // back to orthonormal coefficients
    if (norm2(w) == 0) {
      if (parity == Parity::Sin) return;
      out.add(w, Parity::Cos, component, amplitude * root_vol);
    } else {
      out.add(w, parity, component, amplitude * root_vol / std::sqrt(2.0));
    }
  };

  const Wavevector sum{n[0] + m[0], n[1] + m[1], n[2] + m[2]};
  const Wavevector diff{n[0] - m[0], n[1] - m[1], n[2] - m[2]};
  const double uu = ua * ub;

  if (n_zero && m_zero) {
    emit(sum, Parity::Cos, uu);
    return;
  }
  if (n_zero) {
    emit(m, pm, uu);
    return;
  }
  if (m_zero) {
    emit(n, pn, uu);
    return;
  }
  if (pn == Parity::Sin && pm == Parity::Sin) {
    // sin sin = (cos(diff) - cos(sum)) / 2
    emit(diff, Parity::Cos, 0.5 * uu);
    emit(sum, Parity::Cos, -0.5 * uu);
  } else if (pn == Parity::Cos && pm == Parity::Cos) {
    emit(diff, Parity::Cos, 0.5 * uu);
    emit(sum, Parity::Cos, 0.5 * uu);
  } else if (pn == Parity::Sin && pm == Parity::Cos) {
    // sin(A) cos(B) = (sin(sum) + sin(diff)) / 2
    emit(sum, Parity::Sin, 0.5 * uu);
    emit(diff, Parity::Sin, 0.5 * uu);
  } else {
    // cos(A) sin(B) = (sin(sum) - sin(diff)) / 2
    emit(sum, Parity::Sin, 0.5 * uu);
    emit(diff, Parity::Sin, -0.5 * uu);
  }
}

}  // namespace

SpectralField convect(const SpectralField& u, const SpectralField& v) {
  const int d = u.dimension();
  SpectralField out(d);
  std::vector<SpectralField> dv;
  dv.reserve(d);
  for (int axis = 0; axis < d; ++axis) dv.push_back(derivative(v, axis));
  for (int axis = 0; axis < d; ++axis) {
    for (const auto& [ku, cu] : u.modes()) {
      if (cu[axis] == 0.0) continue;
      for (const auto& [kv, cv] : dv[axis].modes()) {
        for (int comp = 0; comp < d; ++comp) {
          accumulate_scalar_product(out, comp, ku.n, ku.parity, cu[axis], kv.n, kv.parity, cv[comp],
                                    d);
        }
      }
    }
  }
  out.prune(0.0);
  return out;
}

double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
  return convect(u, v).l2_inner(w);
}

NonlinearSplit nonlinear_term(const SpectralField& u) {
  const SpectralField b = convect(u, u);
  LeraySplit split = leray_project(b);
  return NonlinearSplit{std::move(split.P), std::move(split.Q)};
}

SigmaChannel SigmaChannel::constant_vector(int d, const Coefficient& v) {
  SigmaChannel ch;
  ch.constant = true;
  ch.vec = v;
  ch.field = SpectralField(d);
  return ch;
}

SigmaChannel SigmaChannel::band_limited(SpectralField f) {
  SigmaChannel ch;
  ch.constant = false;
  ch.field = std::move(f);
  return ch;
}

bool SigmaFamily::all_constant() const {
  return std::all_of(channels.begin(), channels.end(),
                     [](const SigmaChannel& c) { return c.constant; });
}

double SigmaFamily::n0() const {
  const double root_vol = std::pow(kTwoPi, 0.5 * d);
  double bound = 0.0;
  for (const auto& ch : channels) {
    if (ch.constant) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += ch.vec[c] * ch.vec[c];
      bound = std::max(bound, std::sqrt(s));
      continue;
    }
    // sup-norm bound via the triangle inequality, derivatives to order two
    double total = 0.0;
    for (const auto& [key, coeff] : ch.field.modes()) {
      double amp2 = 0.0;
      for (int c = 0; c < d; ++c) amp2 += coeff[c] * coeff[c];
      const double amp = std::sqrt(amp2) * std::sqrt(2.0) / root_vol;
      const double growth = std::max(1.0, double(norm2(key.n)));
      total += amp * growth;
    }
    bound = std::max(bound, total);
  }
  return bound;
}

void SigmaFamily::validate() const {
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (!channels[k].constant && channels[k].field.divergence_defect() > 1e-12) {
      throw Error("sigma channel " + std::to_string(k) + " is not divergence-free");
    }
  }
}

SpectralField advect(const SigmaChannel& sigma, const SpectralField& f) {
  const int d = f.dimension();
  if (sigma.constant) {
    SpectralField out(d);
    for (const auto& [key, coeff] : f.modes()) {
      double dot = 0.0;
      for (int c = 0; c < d; ++c) dot += sigma.vec[c] * key.n[c];
      if (dot == 0.0) continue;
      const Parity target = key.parity == Parity::Sin ? Parity::Cos : Parity::Sin;
      const double sign = key.parity == Parity::Sin ? 1.0 : -1.0;
      for (int c = 0; c < d; ++c) out.add(key.n, target, c, sign * dot * coeff[c]);
    }
    return out;
  }
  return convect(sigma.field, f);
}

ModeBasis::ModeBasis(int d, int cutoff, std::vector<BasisFunction> fns)
    : d_(d), cutoff_(cutoff), fns_(std::move(fns)) {}

SpectralField ModeBasis::field(std::size_t i) const {
  const BasisFunction& fn = fns_[i];
  SpectralField f(d_);
  for (int c = 0; c < d_; ++c) f.add(fn.n, fn.parity, c, fn.direction[c]);
  return f;
}

Eigen::VectorXd ModeBasis::eigenvalues() const {
  Eigen::VectorXd lambda(fns_.size());
  for (std::size_t i = 0; i < fns_.size(); ++i) lambda(i) = fns_[i].lambda;
  return lambda;
}

Eigen::VectorXd ModeBasis::project(const SpectralField& f) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(fns_.size());
  for (std::size_t i = 0; i < fns_.size(); ++i) {
    const BasisFunction& fn = fns_[i];
    double dot = 0.0;
    for (int comp = 0; comp < d_; ++comp) {
      dot += fn.direction[comp] * f.coefficient(fn.n, fn.parity, comp);
    }
    c(i) = dot;
  }
  return c;
}

SpectralField ModeBasis::synthesize(const Eigen::VectorXd& coeffs) const {
  SpectralField f(d_);
  for (std::size_t i = 0; i < fns_.size(); ++i) {
    if (coeffs(i) == 0.0) continue;
    const BasisFunction& fn = fns_[i];
    for (int c = 0; c < d_; ++c) f.add(fn.n, fn.parity, c, coeffs(i) * fn.direction[c]);
  }
  f.prune();
  return f;
}

double ModeBasis::projection_defect(const SpectralField& f) const {
  SpectralField back = synthesize(project(f));
  return sobolev_norm(f - back, 0.0);
}

std::string ModeBasis::manifest_csv() const {
  std::ostringstream out;
  out << "index,n1,n2";
  if (d_ == 3) out << ",n3";
  out << ",parity,lambda\n";
  for (std::size_t i = 0; i < fns_.size(); ++i) {
    out << i << "," << fns_[i].n[0] << "," << fns_[i].n[1];
    if (d_ == 3) out << "," << fns_[i].n[2];
    out << "," << (fns_[i].parity == Parity::Sin ? "sin" : "cos") << ","
        << format_double(fns_[i].lambda) << "\n";
  }
  return out.str();
}

namespace {

std::vector<Wavevector> representatives(int cutoff, int d) {
  std::vector<Wavevector> reps;
  const int bound = static_cast<int>(std::floor(std::sqrt(double(cutoff))));
  const int zmin = d == 3 ? -bound : 0;
  const int zmax = d == 3 ? bound : 0;
  for (int a = -bound; a <= bound; ++a) {
    for (int b = -bound; b <= bound; ++b) {
      for (int c = zmin; c <= zmax; ++c) {
        Wavevector n{a, b, c};
        if (norm2(n) == 0 || norm2(n) > cutoff) continue;
        if (!is_canonical(n)) continue;
        reps.push_back(n);
      }
    }
  }
  std::sort(reps.begin(), reps.end(), [](const Wavevector& x, const Wavevector& y) {
    if (norm2(x) != norm2(y)) return norm2(x) < norm2(y);
    return x < y;
  });
  return reps;
}

// d = 3 completion: two unit vectors orthogonal to n, deterministic in n.
std::array<Coefficient, 2> orthogonal_pair(const Wavevector& n) {
  Eigen::Vector3d v(n[0], n[1], n[2]);
  v.normalize();
  Eigen::Vector3d seed = std::abs(v(0)) < 0.9 ? Eigen::Vector3d(1, 0, 0) : Eigen::Vector3d(0, 1, 0);
  Eigen::Vector3d m1 = v.cross(seed).normalized();
  Eigen::Vector3d m2 = v.cross(m1).normalized();
  return {Coefficient{m1(0), m1(1), m1(2)}, Coefficient{m2(0), m2(1), m2(2)}};
}

ModeBasis build_basis(int cutoff, int d, bool gradient) {
  if (cutoff < 1) throw EmptyBasis("cutoff must be at least 1");
  if (d != 2 && d != 3) throw Error("basis dimension must be 2 or 3");
  std::vector<BasisFunction> fns;
  for (const Wavevector& n : representatives(cutoff, d)) {
    const double lambda = norm2(n);
    const double inv_len = 1.0 / std::sqrt(lambda);
    std::vector<Coefficient> dirs;
    if (gradient) {
      dirs.push_back(Coefficient{n[0] * inv_len, n[1] * inv_len, n[2] * inv_len});
    } else if (d == 2) {
      dirs.push_back(Coefficient{n[1] * inv_len, -n[0] * inv_len, 0.0});
    } else {
      const auto pair = orthogonal_pair(n);
      dirs.push_back(pair[0]);
      dirs.push_back(pair[1]);
    }
    for (const Coefficient& dir : dirs) {
      fns.push_back(BasisFunction{n, Parity::Sin, lambda, dir});
      fns.push_back(BasisFunction{n, Parity::Cos, lambda, dir});
    }
  }
  return ModeBasis(d, cutoff, std::move(fns));
}

}  // namespace

ModeBasis build_divfree_basis(int cutoff, int d) { return build_basis(cutoff, d, false); }

ModeBasis build_gradient_basis(int cutoff, int d) { return build_basis(cutoff, d, true); }

SpectralField taylor_green() {
  // (cos x sin y, -sin x cos y) = pi w^sin_(1,1) + pi w^sin_(1,-1)
  SpectralField u(2);
  const double pi = kTwoPi / 2.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  u.add(Wavevector{1, 1, 0}, Parity::Sin, 0, pi * inv_sqrt2);
  u.add(Wavevector{1, 1, 0}, Parity::Sin, 1, -pi * inv_sqrt2);
  u.add(Wavevector{1, -1, 0}, Parity::Sin, 0, -pi * inv_sqrt2);
  u.add(Wavevector{1, -1, 0}, Parity::Sin, 1, -pi * inv_sqrt2);
  u.set_divfree_flag(true);
  return u;
}

std::string field_to_csv(const SpectralField& f) {
  std::ostringstream out;
  out << (f.dimension() == 3 ? "n1,n2,n3,parity,comp,value\n" : "n1,n2,parity,comp,value\n");
  for (const auto& [key, coeff] : f.modes()) {
    for (int c = 0; c < f.dimension(); ++c) {
      if (coeff[c] == 0.0) continue;
      out << key.n[0] << "," << key.n[1];
      if (f.dimension() == 3) out << "," << key.n[2];
      out << "," << (key.parity == Parity::Sin ? "sin" : "cos") << "," << (c + 1) << ","
          << format_double(coeff[c]) << "\n";
    }
  }
  return out.str();
}

}  // namespace roughns
