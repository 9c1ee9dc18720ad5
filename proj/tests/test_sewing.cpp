#include <doctest.h>

#include <cmath>

#include "roughns/errors.hpp"
#include "roughns/grid.hpp"
#include "roughns/sewing.hpp"

using namespace roughns;

TEST_CASE("exact increments sew to the path itself") {
  const std::vector<double> times = dyadic_times(1.0, 8);
  auto fn = [](double s, double t) { return std::sin(3.0 * t) - std::sin(3.0 * s); };
  Germ germ = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    v(0) = fn(times[i], times[j]);
    return v;
  };
  ControlFn omega = [&](std::size_t i, std::size_t j) { return times[j] - times[i]; };
  const SewingResult res = sewing_integrate(germ, 1, 0.5, omega, times, 4);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    CHECK(res.path(i, 0) == doctest::Approx(std::sin(3.0 * res.times[i])).epsilon(1e-12));
  }
  CHECK(res.worst_residual < 1e-12);
}

TEST_CASE("a germ of order (t-s)^2 sews to zero") {
  const std::vector<double> times = dyadic_times(1.0, 8);
  Germ germ = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    const double dt = times[j] - times[i];
    v(0) = dt * dt;
    return v;
  };
  ControlFn omega = [&](std::size_t i, std::size_t j) { return times[j] - times[i]; };
  const SewingResult res = sewing_integrate(germ, 1, 0.5, omega, times, 4);
  CHECK(res.path.cwiseAbs().maxCoeff() < 1e-12);
  // the residual is then the germ itself, largest on the full interval
  CHECK(res.worst_residual == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("young germ integrates s ds") {
  const std::vector<double> times = dyadic_times(1.0, 10);
  Germ germ = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    v(0) = times[i] * (times[j] - times[i]);
    return v;
  };
  ControlFn omega = [&](std::size_t i, std::size_t j) { return times[j] - times[i]; };
  const SewingResult res = sewing_integrate(germ, 1, 0.5, omega, times, 4);
  CHECK(res.tail_extrapolated);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const double t = res.times[i];
    CHECK(res.path(i, 0) == doctest::Approx(0.5 * t * t).epsilon(1e-10));
  }
  CHECK(res.observed_constant < 10.0);
}

TEST_CASE("raw level sums are partition independent at the sewing rate") {
  const std::vector<double> times = dyadic_times(1.0, 12);
  Germ germ = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    v(0) = times[i] * (times[j] - times[i]);
    return v;
  };
  const double zeta = 0.5;
  const double omega_total = 1.0;  // omega(0,T) with omega = t - s
  for (int k = 4; k <= 8; k += 2) {
    const int stride = 1 << (12 - k);  // output on the level-k partition
    const Eigen::MatrixXd a = sewing_level_sums(germ, 1, times, stride, k);
    const Eigen::MatrixXd b = sewing_level_sums(germ, 1, times, stride, k + 2);
    const double gap = (a - b).cwiseAbs().maxCoeff();
    const double bound = 4.0 * std::pow(2.0, -k * (1.0 / zeta - 1.0)) *
                         std::pow(omega_total, 1.0 / zeta);
    CHECK(gap <= bound);
  }
}

TEST_CASE("precondition violations raise NotSewable") {
  const std::vector<double> times = dyadic_times(1.0, 6);
  Germ germ = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    v(0) = std::sqrt(times[j] - times[i]);
    return v;
  };
  ControlFn omega = [&](std::size_t i, std::size_t j) { return times[j] - times[i]; };
  CHECK_THROWS_AS(sewing_integrate(germ, 1, 0.5, omega, times, 1), NotSewable);
}

TEST_CASE("zeta = 0 demands exact increments") {
  const std::vector<double> times = dyadic_times(1.0, 4);
  Germ exact = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    v(0) = times[j] * times[j] - times[i] * times[i];
    return v;
  };
  ControlFn omega = [&](std::size_t, std::size_t) { return 0.0; };
  const SewingResult res = sewing_integrate(exact, 1, 0.0, omega, times, 1);
  CHECK(res.path(res.path.rows() - 1, 0) == doctest::Approx(1.0).epsilon(1e-13));
  Germ crooked = [&](std::size_t i, std::size_t j) {
    Eigen::VectorXd v(1);
    const double dt = times[j] - times[i];
    v(0) = dt * dt;
    return v;
  };
  CHECK_THROWS_AS(sewing_integrate(crooked, 1, 0.0, omega, times, 1), NotSewable);
}
