#include <doctest.h>

#include <stdexcept>

#include "adeq/polynomial.hpp"
#include "test_util.hpp"

using namespace adeq;
using testing::naive_eval;
using testing::random_polynomial;

namespace {

const auto plain_name = [](VarId v) { return "x" + std::to_string(v + 1); };

Polynomial x(VarId v) { return Polynomial::variable(v); }

}  // namespace

TEST_SUITE("polynomial") {
  TEST_CASE("normalize merges duplicates and drops exact zeros") {
    const MultiIndex m = MultiIndex::var(0);
    const Polynomial p = normalize({{m, 2.0}, {m, -2.0}, {MultiIndex::var(1), 3.0}});
    CHECK(p.term_count() == 1);
    CHECK(p.coefficient(MultiIndex::var(1)) == 3.0);
    CHECK(p.coefficient(m) == 0.0);
    CHECK(normalize({{m, 1.0}, {m, -1.0}}).is_zero());
  }

  TEST_CASE("multi-index ordering is graded lexicographic") {
    const MultiIndex one;
    const MultiIndex x1 = MultiIndex::var(0);
    const MultiIndex x2 = MultiIndex::var(1);
    const MultiIndex x1x2 = x1.times(x2);
    const MultiIndex x2sq = x2.times(x2);
    CHECK(one < x1);
    CHECK(x1 < x2);
    CHECK(x2 < x1x2);
    CHECK(x1x2 < x2sq);
    CHECK(MultiIndex::var(0, 3).degree() == 3);
  }

  TEST_CASE("arithmetic matches the naive evaluator on random pairs") {
    SplitMix64 rng(41);
    for (int it = 0; it < 200; ++it) {
      const Polynomial p = random_polynomial(rng, 4, 3, 6);
      const Polynomial q = random_polynomial(rng, 4, 2, 4);
      std::vector<double> point(4);
      for (auto& v : point) v = rng.uniform(-2.0, 2.0);
      const double pe = naive_eval(p, point), qe = naive_eval(q, point);
      CHECK((p + q).evaluate(point) == doctest::Approx(pe + qe).epsilon(1e-10));
      CHECK((p - q).evaluate(point) == doctest::Approx(pe - qe).epsilon(1e-10));
      CHECK((p * q).evaluate(point) == doctest::Approx(pe * qe).epsilon(1e-9));
      CHECK((-p).evaluate(point) == doctest::Approx(-pe).epsilon(1e-10));
    }
  }

  TEST_CASE("product keeps normal form") {
    // (x1 + x2) * (x1 - x2) has no x1*x2 term left.
    const Polynomial p = (x(0) + x(1)) * (x(0) - x(1));
    CHECK(p.term_count() == 2);
    CHECK(p.coefficient(MultiIndex::var(0, 2)) == 1.0);
    CHECK(p.coefficient(MultiIndex::var(1, 2)) == -1.0);
    CHECK(p.coefficient(MultiIndex::var(0).times(MultiIndex::var(1))) == 0.0);
  }

  TEST_CASE("derivative matches central finite differences") {
    SplitMix64 rng(77);
    for (int it = 0; it < 100; ++it) {
      const Polynomial p = random_polynomial(rng, 3, 3, 5);
      const VarId v = static_cast<VarId>(rng.next() % 3);
      std::vector<double> point(3);
      for (auto& c : point) c = rng.uniform(-1.0, 1.0);
      const double h = 1e-6;
      std::vector<double> hi = point, lo = point;
      hi[v] += h;
      lo[v] -= h;
      const double fd = (p.evaluate(hi) - p.evaluate(lo)) / (2.0 * h);
      CHECK(p.derivative(v).evaluate(point) == doctest::Approx(fd).epsilon(1e-5));
    }
  }

  TEST_CASE("derivative power rule") {
    const Polynomial p = Polynomial::monomial(MultiIndex::var(0, 3), 2.0);
    const Polynomial d = p.derivative(0);
    CHECK(d.coefficient(MultiIndex::var(0, 2)) == 6.0);
    CHECK(d.term_count() == 1);
    CHECK(p.derivative(1).is_zero());
  }

  TEST_CASE("substitute is an evaluation homomorphism") {
    SplitMix64 rng(123);
    for (int it = 0; it < 100; ++it) {
      const Polynomial p = random_polynomial(rng, 3, 3, 5);
      const Polynomial r0 = random_polynomial(rng, 3, 1, 3);
      const Polynomial r2 = random_polynomial(rng, 3, 2, 3);
      const std::map<VarId, Polynomial> sub{{0, r0}, {2, r2}};
      std::vector<double> point(3);
      for (auto& c : point) c = rng.uniform(-1.5, 1.5);
      const std::vector<double> image{r0.evaluate(point), point[1], r2.evaluate(point)};
      CHECK(substitute(p, sub).evaluate(point) ==
            doctest::Approx(p.evaluate(image)).epsilon(1e-8));
    }
  }

  TEST_CASE("substitute with identity map is identity") {
    SplitMix64 rng(5);
    const Polynomial p = random_polynomial(rng, 3, 3, 6);
    const std::map<VarId, Polynomial> sub{{0, x(0)}, {1, x(1)}};
    CHECK(substitute(p, sub) == p);
    CHECK(substitute(p, {}) == p);
  }

  TEST_CASE("abs_coeff_sum") {
    const Polynomial p = 2.0 * x(0) - 3.5 * x(1) + Polynomial::constant(-0.5);
    CHECK(p.abs_coeff_sum() == doctest::Approx(6.0));
    CHECK(Polynomial{}.abs_coeff_sum() == 0.0);
  }

  TEST_CASE("evaluate rejects unassigned variables by name") {
    const Polynomial p = x(0) + x(5);
    const std::vector<double> point{1.0, 2.0};
    CHECK_THROWS_WITH_AS(p.evaluate(point), doctest::Contains("v5"),
                         std::out_of_range);
  }

  TEST_CASE("formatting round-trips doubles and orders terms") {
    const Polynomial p = -4.0 * x(0) + x(1) + x(2);
    CHECK(format_polynomial(p, plain_name) == "-4*x1 + x2 + x3");
    const Polynomial q =
        Polynomial::constant(0.5) + Polynomial::monomial(MultiIndex::var(1, 2), -1.0) +
        2.0 * Polynomial::monomial(MultiIndex::var(0).times(MultiIndex::var(1)), 1.0);
    CHECK(format_polynomial(q, plain_name) == "0.5 + 2*x1*x2 - x2^2");
    CHECK(format_polynomial(Polynomial{}, plain_name) == "0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  }

  TEST_CASE("degree and variables") {
    const Polynomial p =
        Polynomial::monomial(MultiIndex::var(0, 2).times(MultiIndex::var(3)), 1.0) + x(1);
    CHECK(p.degree() == 3);
    CHECK(p.variables() == std::vector<VarId>{0, 1, 3});
    CHECK(Polynomial::constant(4.0).degree() == 0);
  }
}
