#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "adeq/numerics.hpp"
#include "test_util.hpp"

using namespace adeq;

namespace {

const VectorField decay = [](const std::vector<double>& x, std::vector<double>& dxdt,
                             double) { dxdt[0] = -x[0]; };

const VectorField rotation = [](const std::vector<double>& x, std::vector<double>& dxdt,
                                double) {
  dxdt[0] = x[1];
  dxdt[1] = -x[0];
};

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("grid covers 0..tau with a short last step when needed") {
    const Trajectory t = integrate(decay, {1.0}, 7.0, 0.023);
    CHECK(t.points() == 306);
    CHECK(t.time(0) == 0.0);
    CHECK(t.time(1) == 0.023);
    CHECK(t.time(305) == 7.0);
    CHECK(t.time(304) == doctest::Approx(304 * 0.023));
    CHECK(t.grid_dt() == 0.023);

    const Trajectory u = integrate(decay, {1.0}, 1.0, 0.25);
    CHECK(u.points() == 5);
    CHECK(u.time(4) == 1.0);
  }

  TEST_CASE("exponential decay to integrator accuracy") {
    const Trajectory t = integrate(decay, {1.0}, 5.0, 0.1);
    for (std::size_t i = 0; i < t.points(); ++i) {
      CHECK(t.state(i)(0) == doctest::Approx(std::exp(-t.time(i))).epsilon(1e-8));
      CHECK(t.deriv(i)(0) == doctest::Approx(-std::exp(-t.time(i))).epsilon(1e-8));
    }
  }

  TEST_CASE("harmonic oscillator stays on the circle") {
    const Trajectory t = integrate(rotation, {1.0, 0.0}, 10.0, 0.05);
    for (std::size_t i = 0; i < t.points(); ++i) {
      CHECK(t.state(i)(0) == doctest::Approx(std::cos(t.time(i))).epsilon(1e-7));
      CHECK(t.state(i)(1) == doctest::Approx(-std::sin(t.time(i))).epsilon(1e-7));
    }
  }

  TEST_CASE("hermite interpolation between grid points") {
    const Trajectory t = integrate(decay, {1.0}, 2.0, 0.023);
    SplitMix64 rng(6);
    Eigen::VectorXd out(1);
    for (int it = 0; it < 200; ++it) {
      const double s = rng.uniform(0.0, 2.0);
      t.at(s, out);
      CHECK(out(0) == doctest::Approx(std::exp(-s)).epsilon(1e-8));
    }
    CHECK(t.at(0.0)(0) == 1.0);
    CHECK(t.at(2.0)(0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  }

  TEST_CASE("finite-time blow-up is reported with a time") {
    const VectorField quad = [](const std::vector<double>& x, std::vector<double>& dxdt,
                                double) { dxdt[0] = x[0] * x[0]; };
    CHECK_THROWS_WITH_AS(integrate(quad, {1.0}, 2.0, 0.1),
                         doctest::Contains("diverged"), std::runtime_error);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(integrate(decay, {1.0}, -1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(decay, {1.0}, 1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("infinity norms") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, -2.0, 3.0, 0.5;
    CHECK(inf_norm(m) == 3.5);
    Eigen::VectorXd v(3);
    v << -4.0, 2.0, 1.0;
    CHECK(inf_norm(v) == 4.0);
  }

  TEST_CASE("inversion meets the residual contract") {
    SplitMix64 rng(10);
    for (int it = 0; it < 50; ++it) {
      const int n = 2 + static_cast<int>(rng.next() % 5);
      Eigen::MatrixXd m(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
      m += 3.0 * Eigen::MatrixXd::Identity(n, n);
      const InverseResult inv = invert(m);
      const Eigen::MatrixXd residual =
          m * inv.inverse - Eigen::MatrixXd::Identity(n, n);
      CHECK(inf_norm(residual) <= 1e-8 * inf_norm(m));
      CHECK(inv.condition >= 1.0);
      CHECK(inv.condition <= 1e6);
    }
  }

  TEST_CASE("singular matrices are rejected") {
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 2.0, 2.0, 4.0;
    CHECK_THROWS_WITH_AS(invert(s), doctest::Contains("singular"), std::runtime_error);
    CHECK_THROWS_AS(invert(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
  }

  TEST_CASE("nullspace projection averages a tied pair") {
    Eigen::MatrixXd c(1, 2);
    c << 1.0, -1.0;
    Eigen::VectorXd z0(2);
    z0 << 1.99, 2.01;
    const Eigen::VectorXd z = project_to_nullspace(c, z0);
    CHECK(z(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(z(1) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("nullspace projection matches the kernel-basis oracle") {
    SplitMix64 rng(11);
    for (int it = 0; it < 50; ++it) {
      const int dim = 3 + static_cast<int>(rng.next() % 6);
      const int rows = 1 + static_cast<int>(rng.next() % 3);
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, dim);
      for (int r = 0; r < rows; ++r)
        for (int k = 0; k < dim; ++k)
          if (rng.next() % 3 == 0) c(r, k) = rng.uniform(-2.0, 2.0);
      Eigen::VectorXd z0(dim);
      for (int k = 0; k < dim; ++k) z0(k) = rng.uniform(-3.0, 3.0);

      const Eigen::VectorXd mine = project_to_nullspace(c, z0);
      const Eigen::VectorXd oracle = testing::kernel_projection(c, z0);
      CHECK(inf_norm(Eigen::VectorXd(mine - oracle)) <= 1e-6);
      CHECK(inf_norm(Eigen::VectorXd(c * mine)) <= 1e-9 * std::max(1.0, z0.norm()));
      // projecting twice changes nothing
      const Eigen::VectorXd again = project_to_nullspace(c, mine);
      CHECK(inf_norm(Eigen::VectorXd(again - mine)) <= 1e-9);
    }
  }

  TEST_CASE("duplicate and redundant rows are harmless") {
    Eigen::MatrixXd c(3, 3);
    c << 1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 2.0, -2.0, 0.0;
    Eigen::VectorXd z0(3);
    z0 << 1.0, 3.0, 5.0;
    const Eigen::VectorXd z = project_to_nullspace(c, z0);
    CHECK(z(0) == doctest::Approx(2.0));
    CHECK(z(1) == doctest::Approx(2.0));
    CHECK(z(2) == doctest::Approx(5.0));
  }
}
