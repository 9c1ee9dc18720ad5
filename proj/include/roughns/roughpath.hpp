#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "roughns/grid.hpp"
#include "roughns/pvariation.hpp"

namespace roughns {

// Two-index lift (Z, ZZ) of a path on its grid. Z_{st} = z_t - z_s is read
// straight off the stored points, so first-level additivity is bit exact.
// ZZ is kept as the prefix family ZZ_{0,t}; general pairs are reconstructed
// through Chen's relation, which is an identity for canonical lifts:
//   ZZ_{st} = ZZ_{0t} - ZZ_{0s} - Z_{0s} (x) Z_{st}.
// Component convention: ZZ^{i,j}_{st} = int_s^t (z^i_r - z^i_s) dz^j_r.
class RoughLift {
 public:
  RoughLift(GridPath path, std::vector<Eigen::MatrixXd> zz_prefix, double p);

  const GridPath& path() const { return path_; }
  double exponent() const { return p_; }
  std::size_t size() const { return path_.size(); }
  int channels() const { return path_.channels(); }

  Eigen::VectorXd Z(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd ZZ(std::size_t i, std::size_t j) const;

  // Additive fault injection on a single stored pair, used by the Chen audit.
  void perturb_zz(std::size_t i, std::size_t j, int row, int col, double eps);

  // Control omega_Z(s,t) = |Z|^p_{p-var;[s,t]} + |ZZ|^{p/2}_{p/2-var;[s,t]}
  // evaluated on one interval; omega_control() tabulates all pairs.
  double omega(std::size_t i, std::size_t j) const;
  GridControl omega_control() const;

 private:
  struct Perturbation {
    std::size_t i, j;
    int row, col;
    double eps;
  };
  GridPath path_;
  std::vector<Eigen::MatrixXd> zz_prefix_;
  double p_;
  std::vector<Perturbation> perturbations_;
};

// Canonical lift of the piecewise-linear interpolant: within one step
// ZZ = 1/2 dz (x) dz, across steps composed exactly via Chen's relation.
RoughLift lift_piecewise_linear(const GridPath& path, double p);

// Max over grid triples s <= u <= t of the entrywise Chen defect
// | dZZ_{sut} - Z_{su} (x) Z_{ut} |.
double chen_defect(const RoughLift& lift);

enum class DriverKind { Brownian, Fbm };

// One sample path on a uniform grid with exact increment covariance.
// Brownian increments are iid N(0, dt); fBm uses a dense Cholesky factor of
// the fractional-Gaussian-noise covariance (H in (1/3, 1/2]). Deterministic
// for fixed (seed, grid).
GridPath sample_gaussian_driver(DriverKind kind, double hurst, const std::vector<double>& times,
                                int channels, std::uint64_t seed);

struct MollifiedDriver {
  GridPath nodes;       // the subsampled path at mesh delta
  GridPath fine;        // node interpolant resampled on the source grid
  RoughLift lift;       // canonical lift of the interpolant (source grid)
  double control_ratio; // sup over dyadic pairs of omega_{Z^delta} / omega_Z
};

// Subsample at mesh delta and interpolate linearly. delta must be an integer
// multiple of the source spacing (MeshTooFine otherwise).
MollifiedDriver mollify_driver(const GridPath& path, double delta, double p);

// CSV serialization (17 significant digits, '\n' line endings).
// Paths: header t,z1..zK. Lifts: header s,t,Z_1..Z_K,ZZ_11..ZZ_KK with one
// row per dyadic interval of the grid.
std::string path_to_csv(const GridPath& path);
std::string lift_to_csv(const RoughLift& lift);

}  // namespace roughns
