#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "roughns/errors.hpp"
#include "roughns/pvariation.hpp"
#include "roughns/rng.hpp"
#include "roughns/roughpath.hpp"

using namespace roughns;

namespace {

GridPath path_from(std::vector<double> times, const std::vector<std::vector<double>>& rows) {
  GridPath p;
  p.times = std::move(times);
  p.values = Eigen::MatrixXd(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) p.values(i, k) = rows[i][k];
  }
  return p;
}

}  // namespace

TEST_CASE("canonical lift of a linear path") {
  const GridPath p = path_from({0.0, 1.0}, {{0.0, 0.0}, {1.0, 1.0}});
  const RoughLift lift = lift_piecewise_linear(p, 2.5);
  CHECK(lift.Z(0, 1)(0) == 1.0);
  CHECK(lift.Z(0, 1)(1) == 1.0);
  const Eigen::MatrixXd zz = lift.ZZ(0, 1);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(zz(i, j) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("canonical lift of a constant path is zero") {
  const GridPath p = path_from({0.0, 0.5, 1.0}, {{2.0}, {2.0}, {2.0}});
  const RoughLift lift = lift_piecewise_linear(p, 2.0);
  CHECK(lift.Z(0, 2).norm() == 0.0);
  CHECK(lift.ZZ(0, 2).norm() == 0.0);
}

TEST_CASE("two-segment L-shaped path picks up full area") {
  const GridPath p = path_from({0.0, 1.0, 2.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
  const RoughLift lift = lift_piecewise_linear(p, 2.5);
  const Eigen::MatrixXd zz = lift.ZZ(0, 2);
  CHECK(zz(0, 1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(zz(1, 0) == doctest::Approx(0.0).epsilon(1e-13));
  // Riemann-sum oracle on a fine refinement of the interpolant
  const Eigen::MatrixXd oracle = oracles::levy_riemann(p, 0.0, 2.0, 10000);
  CHECK((zz - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lift rejects degenerate grids and exponents") {
  GridPath p;
  p.times = {0.0};
  p.values = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(lift_piecewise_linear(p, 2.5), InvalidGrid);
  const GridPath ok = path_from({0.0, 1.0}, {{0.0}, {1.0}});
  CHECK_THROWS_AS(lift_piecewise_linear(ok, 3.0), InvalidGrid);
}

TEST_CASE("first-level increments are additive") {
  // integer-valued path scaled by 2^-20: all subtractions are exact
  GaussianStream stream(7);
  GridPath p;
  p.times.resize(33);
  p.values = Eigen::MatrixXd(33, 2);
  double z0 = 0.0, z1 = 0.0;
  for (int i = 0; i < 33; ++i) {
    p.times[i] = i / 32.0;
    p.values(i, 0) = z0;
    p.values(i, 1) = z1;
    z0 += std::floor(stream.normal() * 1024.0) * 0x1.0p-20;
    z1 += std::floor(stream.normal() * 1024.0) * 0x1.0p-20;
  }
  const RoughLift lift = lift_piecewise_linear(p, 2.5);
  for (std::size_t s = 0; s < 33; ++s) {
    for (std::size_t u = s; u < 33; ++u) {
      for (std::size_t t = u; t < 33; t += 3) {
        CHECK((lift.Z(s, t) - lift.Z(s, u) - lift.Z(u, t)).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("chen defect of canonical lifts vanishes") {
  const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, dyadic_times(1.0, 5), 2, 11);
  const RoughLift lift = lift_piecewise_linear(p, 2.5);
  CHECK(chen_defect(lift) < 1e-12);
}

TEST_CASE("a single perturbed ZZ entry shows up as its own defect") {
  const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, dyadic_times(1.0, 4), 2, 3);
  RoughLift lift = lift_piecewise_linear(p, 2.5);
  const double eps = 3e-4;
  lift.perturb_zz(2, 9, 0, 1, eps);
  CHECK(chen_defect(lift) == doctest::Approx(eps).epsilon(1e-9));
}

TEST_CASE("chen defect equals a brute-force triple scan") {
  const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, dyadic_times(1.0, 4), 2, 5);
  RoughLift lift = lift_piecewise_linear(p, 2.5);
  GaussianStream stream(99);
  for (int k = 0; k < 6; ++k) {
    const auto i = static_cast<std::size_t>(stream.uniform01() * 16);
    const auto j = i + 1 + static_cast<std::size_t>(stream.uniform01() * (16 - i));
    lift.perturb_zz(i, j, k % 2, (k + 1) % 2, 1e-3 * stream.normal());
  }
  double brute = 0.0;
  for (std::size_t s = 0; s < lift.size(); ++s) {
    for (std::size_t u = s + 1; u < lift.size(); ++u) {
      for (std::size_t t = u + 1; t < lift.size(); ++t) {
        const Eigen::MatrixXd d = lift.ZZ(s, t) - lift.ZZ(s, u) - lift.ZZ(u, t) -
                                  lift.Z(s, u) * lift.Z(u, t).transpose();
        brute = std::max(brute, d.cwiseAbs().maxCoeff());
      }
    }
  }
  CHECK(chen_defect(lift) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("brownian endpoint variance matches its law") {
  const int replicas = 10000;
  const std::vector<double> grid = dyadic_times(1.0, 10);
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, grid, 1, 1000 + r);
    const double z1 = p.values(p.size() - 1, 0);
    sum += z1;
    sum2 += z1 * z1;
  }
  const double var = sum2 / replicas - (sum / replicas) * (sum / replicas);
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / replicas));
}

TEST_CASE("fbm at H = 1/2 reduces to brownian motion") {
  const std::vector<double> grid = dyadic_times(1.0, 6);
  const GridPath bm = sample_gaussian_driver(DriverKind::Brownian, 0.5, grid, 2, 42);
  const GridPath fbm = sample_gaussian_driver(DriverKind::Fbm, 0.5, grid, 2, 42);
  CHECK((bm.values - fbm.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fbm lag-1 increment correlation matches fGn") {
  const double H = 0.4;
  const std::vector<double> grid = dyadic_times(1.0, 6);  // 64 increments per path
  double s_xy = 0.0, s_xx = 0.0;
  long count = 0;
  for (int r = 0; r < 2000; ++r) {
    const GridPath p = sample_gaussian_driver(DriverKind::Fbm, H, grid, 1, 500 + r);
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
      const double a = p.values(i + 1, 0) - p.values(i, 0);
      const double b = p.values(i + 2, 0) - p.values(i + 1, 0);
      s_xy += a * b;
      s_xx += a * a;
      ++count;
    }
  }
  const double corr = s_xy / s_xx;
  const double expected = std::pow(2.0, 2.0 * H - 1.0) - 1.0;
  CHECK(expected == doctest::Approx(-0.12945).epsilon(1e-3));
  CHECK(std::abs(corr - expected) < 0.02);
}

TEST_CASE("hurst range is enforced") {
  const std::vector<double> grid = dyadic_times(1.0, 3);
  CHECK_THROWS_AS(sample_gaussian_driver(DriverKind::Fbm, 0.3, grid, 1, 1), UnsupportedHurst);
  CHECK_THROWS_AS(sample_gaussian_driver(DriverKind::Fbm, 0.7, grid, 1, 1), UnsupportedHurst);
  const std::vector<double> skewed{0.0, 0.25, 1.0};
  CHECK_THROWS_AS(sample_gaussian_driver(DriverKind::Brownian, 0.5, skewed, 1, 1), InvalidGrid);
}

TEST_CASE("chen defect needs a genuine triple") {
  const GridPath p = path_from({0.0, 1.0}, {{0.0}, {1.0}});
  CHECK_THROWS_AS(chen_defect(lift_piecewise_linear(p, 2.5)), InvalidGrid);
}

TEST_CASE("levy area variance approaches one half under refinement") {
  const int replicas = 2000;
  auto variance_at = [&](int depth) {
    const std::vector<double> grid = dyadic_times(1.0, depth);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < replicas; ++r) {
      const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, grid, 2,
                                                split_seed(5150, 0x616e6eULL, r));
      double zz = 0.0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double rel = p.values(i, 0) - p.values(0, 0);
        zz += rel * (p.values(i + 1, 1) - p.values(i, 1)) +
              0.5 * (p.values(i + 1, 0) - p.values(i, 0)) *
                  (p.values(i + 1, 1) - p.values(i, 1));
      }
      sum += zz;
      sum2 += zz * zz;
    }
    return sum2 / replicas - (sum / replicas) * (sum / replicas);
  };
  const double coarse = variance_at(4);
  const double fine = variance_at(9);
  // same normals drive both meshes, so the comparison is paired
  CHECK(std::abs(fine - 0.5) < std::abs(coarse - 0.5) + 0.05);
  CHECK(std::abs(fine - 0.5) < 4.0 * std::sqrt(2.0) * 0.5 / std::sqrt(double(replicas)));
}

TEST_CASE("p-variation matches tiny closed forms") {
  const GridPath mono = path_from({0.0, 0.5, 1.0}, {{0.0}, {0.5}, {1.0}});
  auto norm = [&](std::size_t i, std::size_t j) {
    return std::abs(mono.values(j, 0) - mono.values(i, 0));
  };
  CHECK(p_variation(norm, 3, 2.0) == doctest::Approx(1.0));  // coarsest partition wins
  CHECK(p_variation(norm, 3, 2.0) ==
        doctest::Approx(oracles::pvar_exhaustive(norm, 3, 2.0)));
  CHECK(p_variation(norm, 3, 1.0) == doctest::Approx(1.0));

  const GridPath saw = path_from({0.0, 1.0, 2.0, 3.0}, {{0.0}, {1.0}, {0.0}, {1.0}});
  auto saw_norm = [&](std::size_t i, std::size_t j) {
    return std::abs(saw.values(j, 0) - saw.values(i, 0));
  };
  CHECK(p_variation(saw_norm, 4, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("p-variation equals exhaustive enumeration on grids up to 12 points") {
  GaussianStream stream(2024);
  for (std::size_t n = 2; n <= 12; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<double> z(n);
      for (double& v : z) v = stream.normal();
      auto norm = [&](std::size_t i, std::size_t j) { return std::abs(z[j] - z[i]); };
      for (double p : {1.0, 2.0, 2.5}) {
        CHECK(p_variation(norm, n, p) == oracles::pvar_exhaustive(norm, n, p));
      }
    }
  }
  auto dummy = [](std::size_t, std::size_t) { return 0.0; };
  CHECK_THROWS_AS(p_variation(dummy, 1, 2.0), InvalidGrid);
}

TEST_CASE("mesh-restricted p-variation obeys the restriction") {
  // 3-point sawtooth: the coarse step {0,2} is forbidden once varpi > L
  const std::vector<double> z{0.0, 1.0, 0.0};
  auto norm = [&](std::size_t i, std::size_t j) { return std::abs(z[j] - z[i]); };
  auto varpi = [](std::size_t i, std::size_t j) { return static_cast<double>(j - i); };
  MeshRestriction mesh{varpi, 1.0};
  CHECK(p_variation(norm, 3, 1.0, mesh) == doctest::Approx(2.0));
  CHECK(p_variation(norm, 3, 1.0) == doctest::Approx(2.0));  // same here: fine partition wins
  const std::vector<double> mono{0.0, 0.5, 1.0};
  auto mono_norm = [&](std::size_t i, std::size_t j) { return std::abs(mono[j] - mono[i]); };
  CHECK(p_variation(mono_norm, 3, 2.0, mesh) == doctest::Approx(0.5 * std::sqrt(2.0)));
}

TEST_CASE("omega_Z is superadditive on every grid triple") {
  const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, dyadic_times(1.0, 5), 2, 8);
  const RoughLift lift = lift_piecewise_linear(p, 2.5);
  const GridControl omega = lift.omega_control();
  CHECK(omega.superadditivity_defect() <= 1e-12);
  CHECK(omega(0, 0) == 0.0);
}

TEST_CASE("mollifying a linear path is exact") {
  GridPath p;
  p.times = dyadic_times(1.0, 5);
  p.values = Eigen::MatrixXd(p.times.size(), 1);
  for (std::size_t i = 0; i < p.times.size(); ++i) p.values(i, 0) = 3.0 * p.times[i];
  const MollifiedDriver moll = mollify_driver(p, 0.25, 2.5);
  CHECK((moll.fine.values - p.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mollifying at the full interval keeps Z and squares it") {
  const GridPath p = sample_gaussian_driver(DriverKind::Brownian, 0.5, dyadic_times(1.0, 5), 2, 21);
  const MollifiedDriver moll = mollify_driver(p, 1.0, 2.5);
  CHECK(moll.nodes.size() == 2);
  const RoughLift source = lift_piecewise_linear(p, 2.5);
  const Eigen::VectorXd z = source.Z(0, p.size() - 1);
  CHECK((moll.lift.Z(0, p.size() - 1) - z).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd zz = moll.lift.ZZ(0, p.size() - 1);
  CHECK((zz - 0.5 * z * z.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(moll.control_ratio >= 0.0);
}

TEST_CASE("mollification error decreases with the mesh") {
  const GridPath p =
      sample_gaussian_driver(DriverKind::Brownian, 0.5, dyadic_times(1.0, 10), 1, 33);
  double prev = -1.0;
  for (int k = 2; k <= 8; k += 2) {
    const MollifiedDriver moll = mollify_driver(p, std::pow(2.0, -k), 2.5);
    const double sup = (moll.fine.values - p.values).cwiseAbs().maxCoeff();
    if (prev >= 0.0) CHECK(sup < prev);
    prev = sup;
  }
  CHECK_THROWS_AS(mollify_driver(p, std::pow(2.0, -11), 2.5), MeshTooFine);
}

TEST_CASE("path and lift csv formats") {
  const GridPath p = path_from({0.0, 1.0}, {{0.25, 0.5}, {1.0, -1.0}});
  const std::string csv = path_to_csv(p);
  CHECK(csv.substr(0, 8) == "t,z1,z2\n");
  const RoughLift lift = lift_piecewise_linear(p, 2.5);
  const std::string lcsv = lift_to_csv(lift);
  CHECK(lcsv.substr(0, 28) == "s,t,Z_1,Z_2,ZZ_11,ZZ_12,ZZ_2");
}
