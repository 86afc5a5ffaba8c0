#include <doctest.h>

#include <stdexcept>

#include "adeq/bounds.hpp"
#include "adeq/numerics.hpp"
#include "adeq/reference.hpp"
#include "test_util.hpp"

using namespace adeq;

namespace {

LinearForm row(std::vector<std::pair<VarId, double>> coeffs) { return {std::move(coeffs)}; }

}  // namespace

TEST_SUITE("reference") {
  TEST_CASE("backward constraints pin the asymmetric pair and chain the states") {
    const PIVP m = testing::running_example().pivp;
    const ExtendedPIVP e = extend(m);
    const Partition h({{0}, {1, 2}}, 3);
    const ConstraintSystem c = build_constraints(e, h, Mode::Backward);
    CHECK(c.dimension == 10);
    // c(x2,x1) - c(x3,x1) = 0
    CHECK(c.contains(row({{6, 1.0}, {8, -1.0}})));
    // c(x2,x2) - c(x3,x3) = 0
    CHECK(c.contains(row({{7, 1.0}, {9, -1.0}})));
    // x2 - x3 = 0
    CHECK(c.contains(row({{1, 1.0}, {2, -1.0}})));
    CHECK(c.rows.size() == 3);
  }

  TEST_CASE("reference solve nudges only the violated coordinates") {
    const PIVP m = testing::running_example().pivp;
    const ExtendedPIVP e = extend(m);
    const Partition h({{0}, {1, 2}}, 3);
    const std::vector<double> sigma =
        solve_reference(e, build_constraints(e, h, Mode::Backward));
    REQUIRE(sigma.size() == 10);
    CHECK(sigma[6] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sigma[8] == doctest::Approx(2.0).epsilon(1e-12));
    for (const std::size_t i : {0, 1, 2, 3, 4, 5, 7, 9})
      CHECK(sigma[i] == doctest::Approx(e.sigma0[i]).epsilon(1e-12));
    double dist = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
      dist = std::max(dist, std::abs(sigma[i] - e.sigma0[i]));
    CHECK(dist == doctest::Approx(0.01).epsilon(1e-9));
    // the instantiated reference model is exactly reducible
    const PIVP ref = instantiate(e, sigma);
    CHECK(equiv_distance(ref, h, 1, 2, Mode::Backward) <= 1e-12);
  }

  TEST_CASE("forward constraints are already satisfied on the example") {
    const PIVP m = testing::running_example().pivp;
    const ExtendedPIVP e = extend(m);
    const Partition h({{0}, {1, 2}}, 3);
    const ConstraintSystem c = build_constraints(e, h, Mode::Forward);
    const std::vector<double> sigma = solve_reference(e, c);
    for (std::size_t i = 0; i < sigma.size(); ++i)
      CHECK(sigma[i] == doctest::Approx(e.sigma0[i]).epsilon(1e-12));
  }

  TEST_CASE("constraint rows are canonical and deduplicated") {
    const PIVP m = testing::running_example().pivp;
    const ExtendedPIVP e = extend(m);
    const ConstraintSystem c =
        build_constraints(e, Partition({{0}, {1, 2}}, 3), Mode::Backward);
    for (const auto& r : c.rows) {
      REQUIRE(!r.coeffs.empty());
      CHECK(r.coeffs.front().second > 0.0);
      for (std::size_t i = 1; i < r.coeffs.size(); ++i)
        CHECK(r.coeffs[i - 1].first < r.coeffs[i].first);
    }
    for (std::size_t a = 0; a < c.rows.size(); ++a)
      for (std::size_t b = a + 1; b < c.rows.size(); ++b)
        CHECK(!(c.rows[a] == c.rows[b]));
  }

  TEST_CASE("projection beats random feasible alternatives") {
    SplitMix64 rng(404);
    int nontrivial = 0;
    for (int it = 0; it < 20; ++it) {
      const std::size_t n = 2 + rng.next() % 3;
      const PIVP m = testing::random_pivp(rng, n, 2, 3);
      const ExtendedPIVP e = extend(m);
      const auto partitions = testing::all_partitions(n);
      const Partition& h = partitions[rng.next() % partitions.size()];
      const Mode mode = (rng.next() & 1) ? Mode::Backward : Mode::Forward;
      const ConstraintSystem c = build_constraints(e, h, mode);
      const std::vector<double> sigma = solve_reference(e, c);
      const Eigen::Map<const Eigen::VectorXd> z(sigma.data(), sigma.size());
      const Eigen::Map<const Eigen::VectorXd> z0(e.sigma0.data(), e.sigma0.size());

      const Eigen::MatrixXd dense = c.dense();
      if (c.rows.size() > 0) ++nontrivial;
      CHECK(inf_norm(Eigen::VectorXd(dense * z)) <= 1e-9 * std::max(1.0, z0.norm()));
      const Eigen::VectorXd oracle = testing::kernel_projection(dense, z0);
      CHECK(inf_norm(Eigen::VectorXd(z - oracle)) <= 1e-6);

      // any other feasible point is at least as far from sigma0
      Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
      lu.setThreshold(1e-10);
      if (lu.dimensionOfKernel() > 0) {
        const Eigen::MatrixXd basis = lu.kernel();
        for (int trial = 0; trial < 5; ++trial) {
          Eigen::VectorXd w(basis.cols());
          for (int k = 0; k < w.size(); ++k) w(k) = rng.uniform(-1.0, 1.0);
          const Eigen::VectorXd other = z + basis * w;
          CHECK((other - z0).norm() + 1e-9 >= (z - z0).norm());
        }
      }
    }
    CHECK(nontrivial > 0);
  }

  TEST_CASE("backward quotient of the repaired example") {
    const PIVP m = testing::running_example().pivp;
    const ExtendedPIVP e = extend(m);
    const Partition h({{0}, {1, 2}}, 3);
    const PIVP ref =
        instantiate(e, solve_reference(e, build_constraints(e, h, Mode::Backward)));
    const PIVP q = quotient_backward(ref, h);
    REQUIRE(q.size() == 2);
    CHECK(q.names == std::vector<std::string>{"x1", "x2"});
    CHECK(q.init == std::vector<double>{1.0, 0.5});
    CHECK(q.rhs[0].coefficient(MultiIndex::var(0)) == -4.0);
    CHECK(q.rhs[0].coefficient(MultiIndex::var(1)) == 2.0);
    CHECK(q.rhs[1].coefficient(MultiIndex::var(0)) == doctest::Approx(2.0));
    CHECK(q.rhs[1].coefficient(MultiIndex::var(1)) == -1.0);

    // the collapsed variable tracks each member of its block
    const ExtendedPIVP ef = testing::literal_extension(ref);
    const ExtendedPIVP eq = testing::literal_extension(q);
    const Trajectory full = reference_trajectory(ef, ef.sigma0, 3.0, 0.05);
    const Trajectory red = reference_trajectory(eq, eq.sigma0, 3.0, 0.05);
    for (std::size_t i = 0; i < full.points(); ++i) {
      CHECK(full.state(i)(1) == doctest::Approx(red.state(i)(1)).epsilon(1e-7));
      CHECK(full.state(i)(2) == doctest::Approx(red.state(i)(1)).epsilon(1e-7));
      CHECK(full.state(i)(0) == doctest::Approx(red.state(i)(0)).epsilon(1e-7));
    }
  }

  TEST_CASE("backward quotient preconditions") {
    const PIVP m = testing::running_example().pivp;
    const Partition h({{0}, {1, 2}}, 3);
    CHECK_THROWS_WITH_AS(quotient_backward(m, h), doctest::Contains("not an exact"),
                         std::runtime_error);

    PIVP unequal = parse_model(
                       "vars a b\ninit a = 1\ninit b = 2\n"
                       "eq d(a) = -1*a\neq d(b) = -1*b\n")
                       .pivp;
    CHECK_THROWS_WITH_AS(quotient_backward(unequal, Partition::single_block(2)),
                         doctest::Contains("initial conditions"), std::runtime_error);
  }

  TEST_CASE("forward quotient merges the block into a sum variable") {
    const PIVP m = testing::running_example().pivp;
    const Partition h({{0}, {1, 2}}, 3);
    const PIVP q = quotient_forward(m, h);
    REQUIRE(q.size() == 2);
    CHECK(q.names == std::vector<std::string>{"x1", "x2_x3"});
    CHECK(q.init == std::vector<double>{1.0, 1.0});
    CHECK(q.rhs[0].coefficient(MultiIndex::var(0)) == -4.0);
    CHECK(q.rhs[0].coefficient(MultiIndex::var(1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.rhs[1].coefficient(MultiIndex::var(0)) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(q.rhs[1].coefficient(MultiIndex::var(1)) == doctest::Approx(-1.0).epsilon(1e-12));

    // the sum variable tracks x2 + x3 of the full model
    const ExtendedPIVP ef = testing::literal_extension(m);
    const ExtendedPIVP eq = testing::literal_extension(q);
    const Trajectory full = reference_trajectory(ef, ef.sigma0, 3.0, 0.05);
    const Trajectory red = reference_trajectory(eq, eq.sigma0, 3.0, 0.05);
    for (std::size_t i = 0; i < full.points(); ++i) {
      CHECK(full.state(i)(1) + full.state(i)(2) ==
            doctest::Approx(red.state(i)(1)).epsilon(1e-7));
      CHECK(full.state(i)(0) == doctest::Approx(red.state(i)(0)).epsilon(1e-7));
    }
  }

  TEST_CASE("forward quotient rejects inexact partitions") {
    const PIVP m = testing::running_example().pivp;
    CHECK_THROWS_AS(quotient_forward(m, Partition({{0, 1}, {2}}, 3)),
                    std::runtime_error);
  }

  TEST_CASE("h-tree backward quotient after the reference repair") {
    const HtreeModel ht = gen_htree({3, 1e-4, 2.0, 21});
    const ExtendedPIVP e = extend(ht.pivp);
    const Partition h = coarsest_partition(ht.pivp, ht.partition, 6e-4, Mode::Backward);
    CHECK(h == ht.partition);
    const std::vector<double> sigma =
        solve_reference(e, build_constraints(e, h, Mode::Backward));
    const PIVP ref = instantiate(e, sigma);
    const PIVP q = quotient_backward(ref, h);
    CHECK(q.size() == h.block_count());
    // one voltage per level, the root rate, the coupling pair, one rate per deeper level
    CHECK(q.size() == 7);
  }
}
