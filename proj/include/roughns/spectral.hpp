#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace roughns {

// Band-limited vector calculus on the torus T^d (d = 2 or 3), over the real
// sin/cos Fourier system. Coefficients are stored against the L2-orthonormal
// scalars
//   e^sin_n = sqrt(2) (2pi)^{-d/2} sin(n.x),  e^cos_n analogous,  e_0 = (2pi)^{-d/2},
// one representative wavevector per +-n pair (first nonzero component > 0),
// so |f|_0^2 is the plain sum of squared coefficients.

enum class Parity : std::uint8_t { Sin = 0, Cos = 1 };

using Wavevector = std::array<int, 3>;  // n[2] == 0 when d == 2

int norm2(const Wavevector& n);
bool is_canonical(const Wavevector& n);  // n != 0, first nonzero component > 0
// Returns (canonical vector, sign), where sign = -1 iff n was flipped.
std::pair<Wavevector, int> canonicalize(const Wavevector& n);

struct ModeKey {
  Wavevector n{0, 0, 0};
  Parity parity = Parity::Cos;
  bool operator<(const ModeKey& o) const;
  bool operator==(const ModeKey& o) const { return n == o.n && parity == o.parity; }
};

using Coefficient = std::array<double, 3>;  // one value per field component

class SpectralField {
 public:
  explicit SpectralField(int d = 2);

  int dimension() const { return d_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t mode_count() const { return coeffs_.size(); }
  const std::map<ModeKey, Coefficient>& modes() const { return coeffs_; }

  // Accumulates into (mode, component); the wavevector is canonicalized and
  // sin-parity signs adjusted. Adding to (0, Sin) is a no-op (identically 0).
  void add(const Wavevector& n, Parity parity, int component, double value);
  double coefficient(const Wavevector& n, Parity parity, int component) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(double factor);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b);
  friend SpectralField operator*(double s, SpectralField f) { return f *= s; }

  double l2_inner(const SpectralField& other) const;
  double max_wavenumber() const;  // max |n| over stored modes
  bool has_mean_component(double tol = 0.0) const;

  // max over modes of |n . coeff_vec|; zero for divergence-free fields.
  double divergence_defect() const;
  bool divfree_flag() const { return divfree_; }
  void set_divfree_flag(bool v) { divfree_ = v; }

  // Pointwise evaluation (tests and quadrature oracles).
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

  void prune(double tol = 0.0);  // drop |coefficient| <= tol entries

 private:
  int d_;
  bool divfree_ = false;
  std::map<ModeKey, Coefficient> coeffs_;
};

// --- field operations ---------------------------------------------------

double sobolev_norm(const SpectralField& f, double alpha);

struct LeraySplit {
  SpectralField P;  // divergence-free part (plus the n = 0 component)
  SpectralField Q;  // gradient part
};
LeraySplit leray_project(const SpectralField& f);

// J^eta = S_{floor(1/eta)}: zeroes every mode with |n| >= floor(1/eta).
SpectralField smoothing_apply(const SpectralField& f, double eta);

// d/dx_j, exact per mode.
SpectralField derivative(const SpectralField& f, int axis);

// (u . grad) v by exact convolution over the finite mode sets.
SpectralField convect(const SpectralField& u, const SpectralField& v);

double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w);

struct NonlinearSplit {
  SpectralField BP;
  SpectralField BQ;
};
NonlinearSplit nonlinear_term(const SpectralField& u);

// --- sigma family --------------------------------------------------------

struct SigmaChannel {
  bool constant = true;
  Coefficient vec{0.0, 0.0, 0.0};  // when constant
  SpectralField field;             // when band-limited (divergence-free)

  static SigmaChannel constant_vector(int d, const Coefficient& v);
  static SigmaChannel band_limited(SpectralField f);
};

struct SigmaFamily {
  int d = 2;
  std::vector<SigmaChannel> channels;

  int K() const { return static_cast<int>(channels.size()); }
  bool all_constant() const;
  // Upper bound on sup |sigma| and its derivatives to order two.
  double n0() const;
  void validate() const;  // each channel divergence-free
};

// (sigma_k . grad) f; exact per mode for constant sigma, exact convolution
// for band-limited sigma.
SpectralField advect(const SigmaChannel& sigma, const SpectralField& f);

// --- bases ---------------------------------------------------------------

struct BasisFunction {
  Wavevector n;
  Parity parity;
  double lambda;                    // |n|^2
  Coefficient direction{0, 0, 0};   // unit vector; field = direction * e_n^parity
};

class ModeBasis {
 public:
  ModeBasis() = default;
  ModeBasis(int d, int cutoff, std::vector<BasisFunction> fns);

  int dimension() const { return d_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return fns_.size(); }
  const BasisFunction& operator[](std::size_t i) const { return fns_[i]; }
  const std::vector<BasisFunction>& functions() const { return fns_; }

  SpectralField field(std::size_t i) const;
  Eigen::VectorXd eigenvalues() const;

  // L2 coefficients of f against the basis (exact: single-mode lookups).
  Eigen::VectorXd project(const SpectralField& f) const;
  SpectralField synthesize(const Eigen::VectorXd& coeffs) const;

  // Residual |f - synth(project(f))|_0.
  double projection_defect(const SpectralField& f) const;

  std::string manifest_csv() const;  // index,n1,n2[,n3],parity,lambda

 private:
  int d_ = 2;
  int cutoff_ = 0;
  std::vector<BasisFunction> fns_;
};

// Divergence-free Stokes eigenbasis {h_m}: directions n_perp/|n| for d = 2,
// the two-vector orthonormal completion m_j(n) for d = 3; eigenvalues |n|^2
// nondecreasing. Throws EmptyBasis for cutoff < 1.
ModeBasis build_divfree_basis(int cutoff, int d = 2);

// Orthonormal basis of the gradient modes (directions n/|n|), spanning the
// image of Q on the band-limited space.
ModeBasis build_gradient_basis(int cutoff, int d = 2);

// Taylor-Green vortex (cos x sin y, -sin x cos y) on T^2.
SpectralField taylor_green();

// Field CSV: n1,n2[,n3],parity,comp,value.
std::string field_to_csv(const SpectralField& f);

}  // namespace roughns
