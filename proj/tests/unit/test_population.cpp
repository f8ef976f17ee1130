#include <doctest.h>

#include <cmath>

#include "mrt/error.hpp"
#include "mrt/population.hpp"
#include "mrt/random.hpp"

using namespace mrt;
using doctest::Approx;

namespace {
const RandomCoefficientPopulation kPop = RandomCoefficientPopulation::reference();
}

TEST_CASE("budget validation") {
  CHECK_THROWS_AS(Budget::two_good(0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(Budget::two_good(1.0, -1.0), ArgumentError);
  CHECK_THROWS_AS(Budget(Vector(), 1.0), ArgumentError);
  const Budget b = Budget::two_good(0.5, 1.5);
  CHECK(b.price() == 0.5);
  CHECK(b.with_income(2.0).income() == 2.0);
  Vector p(2);
  p << 1.0, 2.0;
  CHECK_THROWS_AS(Budget(p, 1.0).price(), ArgumentError);
}

TEST_CASE("rc demand") {
  CHECK(rc_demand(kPop, 2.0 / 3.0, 0.5, Budget::two_good(0.5, 1.5)) == Approx(1.0 - 1.0 / 3 + 0.75));
  CHECK(rc_demand(kPop, 1.0, 2.0 / 3.0, Budget::two_good(1, 2)) == Approx(4.0 / 3.0));
  const RandomCoefficientPopulation zero(0, 0, 0, 0);
  CHECK(rc_demand(zero, 0, 0, Budget::two_good(0.3, 1.7)) == 1.0);
  CHECK_THROWS_AS(rc_demand(kPop, 0.1, 0.5, Budget::two_good(1, 1)), DomainError);
  CHECK_THROWS_AS(rc_demand(kPop, 0.5, 0.9, Budget::two_good(1, 1)), DomainError);
  CHECK_THROWS_AS(RandomCoefficientPopulation(1, 0, 0, 1), ArgumentError);
}

TEST_CASE("rc support bounds") {
  SupportBounds s = rc_support_bounds(kPop, Budget::two_good(0.5, 1.5));
  CHECK(s.q_min == Approx(1.0));
  CHECK(s.q_max == Approx(11.0 / 6.0));
  CHECK(s.positive);
  s = rc_support_bounds(kPop, Budget::two_good(1, 1));
  CHECK(s.q_min == Approx(1.0 / 3.0));
  CHECK(s.q_max == Approx(4.0 / 3.0));
  const RandomCoefficientPopulation point(0.4, 0.4, 0.2, 0.2);
  s = rc_support_bounds(point, Budget::two_good(0.7, 1.3));
  CHECK(s.q_min == Approx(s.q_max));
  CHECK(s.q_min == Approx(1 - 0.4 * 0.7 + 0.2 * 1.3));
  const RandomCoefficientPopulation steep(3.0, 4.0, 0.0, 0.1);
  CHECK_FALSE(rc_support_bounds(steep, Budget::two_good(1, 1)).positive);
}

TEST_CASE("rc slutsky statistic") {
  CHECK(rc_slutsky_statistic(kPop, 1.0, 1.0 / 3.0, Budget::two_good(1, 2)) == Approx(-7.0 / 9.0));
  CHECK(rc_slutsky_statistic(kPop, 1.0 / 3.0, 2.0 / 3.0, Budget::two_good(1, 2)) == Approx(1.0));
  const RandomCoefficientPopulation no_income(0.5, 0.9, 0.0, 0.0);
  CHECK(rc_slutsky_statistic(no_income, 0.7, 0.0, Budget::two_good(0.4, 1.4)) == Approx(-0.7));
}

TEST_CASE("sampled demand stays inside the support bounds") {
  RandomCoefficientSampler s(kPop);
  const Budget b = Budget::two_good(0.35, 1.8);
  const SupportBounds sb = rc_support_bounds(kPop, b);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double q = s.draw(b, 7, i).quantity[0];
    REQUIRE(q >= sb.q_min - 1e-12);
    REQUIRE(q <= sb.q_max + 1e-12);
  }
}

TEST_CASE("samplers are reproducible and seed dependent") {
  RandomCoefficientSampler s(kPop);
  const Budget b = Budget::two_good(0.5, 1.5);
  CHECK(s.draw(b, 3, 11).quantity[0] == s.draw(b, 3, 11).quantity[0]);
  CHECK(s.draw(b, 3, 11).quantity[0] != s.draw(b, 4, 11).quantity[0]);
  const DemandDraw d = s.draw(b, 3, 11);
  CHECK(d.dq_dp(0, 0) < 0.0);
  CHECK(d.dq_dy[0] > 0.0);
}

TEST_CASE("irrational share") {
  const RandomCoefficientPopulation no_income(1.0 / 3, 1, 0, 0);
  CHECK(rc_irrational_share(no_income, Budget::two_good(0.5, 1.5)) == 0.0);
  CHECK(rc_irrational_share(kPop, Budget::two_good(1, 1)) == Approx(0.25).epsilon(0.01));
  CHECK(rc_irrational_share(kPop, Budget::two_good(0.1, 2)) == Approx(0.801).epsilon(0.01));
  CHECK_THROWS_AS(rc_irrational_share(kPop, Budget::two_good(1, 2), MonteCarloShare{0, 1}),
                  ArgumentError);

  SUBCASE("analytic agrees with Monte Carlo at random budgets") {
    const CounterRng rng(99);
    for (std::uint64_t i = 0; i < 20; ++i) {
      const Budget b = Budget::two_good(uniform_on(0.1, 1, rng.uniform(i, 0)),
                                        uniform_on(1, 2, rng.uniform(i, 1)));
      const double a = rc_irrational_share(kPop, b);
      const double m = rc_irrational_share(kPop, b, MonteCarloShare{1000000, 5 + i});
      CHECK(std::abs(a - m) < 0.005);
    }
  }

  SUBCASE("monotone over the experiment grid") {
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        const double p = 0.1 + 0.9 * i / 15.0;
        const double y = 1.0 + j / 15.0;
        const double s = rc_irrational_share(kPop, Budget::two_good(p, y));
        if (i > 0) CHECK(s <= rc_irrational_share(kPop, Budget::two_good(p - 0.06, y)) + 1e-12);
        if (j > 0) CHECK(s >= rc_irrational_share(kPop, Budget::two_good(p, y - 1.0 / 15)) - 1e-12);
      }
    }
  }
}

TEST_CASE("cobb-douglas types") {
  const auto cd = cobb_douglas_sampler(0.5);
  const DemandDraw d = cd->draw(Budget::two_good(1, 2), 0, 0);
  CHECK(d.quantity[0] == Approx(1.0));
  CHECK(d.dq_dp(0, 0) == Approx(-1.0));
  CHECK(d.dq_dy[0] == Approx(0.5));
  CHECK_THROWS_AS(cobb_douglas_sampler(1.0), ArgumentError);
  CHECK_THROWS_AS(cobb_douglas_sampler(0.0), ArgumentError);

  SUBCASE("individual slutsky term is nonpositive") {
    const CounterRng rng(1);
    for (std::uint64_t i = 0; i < 100; ++i) {
      const double alpha = uniform_on(0.05, 0.95, rng.uniform(i, 0));
      const Budget b = Budget::two_good(uniform_on(0.1, 3, rng.uniform(i, 1)),
                                        uniform_on(0.5, 4, rng.uniform(i, 2)));
      const DemandDraw di = cobb_douglas_sampler(alpha)->draw(b, 0, 0);
      const double expected = alpha * b.income() / (b.price() * b.price()) * (alpha - 1.0);
      CHECK(di.slutsky_scalar() == Approx(expected));
      CHECK(di.slutsky_scalar() <= 0.0);
    }
  }

  SUBCASE("mixture mean demand") {
    Vector a1(1), a2(1);
    a1 << 0.3;
    a2 << 0.6;
    const auto mix = cobb_douglas_mixture_sampler({a1, a2}, {0.5, 0.5});
    const auto types = mix->enumerate(Budget::two_good(1, 2));
    REQUIRE(types);
    double mean = 0.0;
    for (const auto& t : *types) mean += t.weight * t.draw.quantity[0];
    CHECK(mean == Approx(0.9));
    double mc = 0.0;
    for (std::uint64_t i = 0; i < 200000; ++i) mc += mix->draw(Budget::two_good(1, 2), 3, i).quantity[0];
    CHECK(mc / 200000 == Approx(0.9).epsilon(0.005));
    CHECK_THROWS_AS(cobb_douglas_mixture_sampler({a1, a2}, {0.5, 0.6}), ArgumentError);
  }
}

TEST_CASE("gorman types") {
  Vector c(2);
  c << 0.2, 0.1;
  const auto flat = gorman_sampler(c, std::make_shared<ZeroIntercept>(2));
  Vector p(2);
  p << 0.5, 0.8;
  const Budget b(p, 1.5);
  const DemandDraw d = flat->draw(b, 1, 2);
  CHECK(d.quantity[0] == Approx(0.3));
  CHECK(d.dq_dy[1] == Approx(0.1));
  CHECK(d.dq_dp.norm() == 0.0);

  SUBCASE("polar-form fixture is rational on the experiment box") {
    const auto g = gorman_rational_fixture(c);
    const CounterRng rng(4);
    for (std::uint64_t i = 0; i < 200; ++i) {
      Vector pp(2);
      pp << uniform_on(0.1, 1, rng.uniform(i, 0)), uniform_on(0.1, 1, rng.uniform(i, 1));
      const Budget bb(pp, uniform_on(1, 2, rng.uniform(i, 2)));
      const DemandDraw di = g->draw(bb, 8, i);
      CHECK(di.quantity.minCoeff() > 0.0);
      const Matrix S = di.slutsky();
      CHECK((S - S.transpose()).norm() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(S);
      CHECK(es.eigenvalues().maxCoeff() <= 1e-12);
      CHECK((di.dq_dy - c).norm() == 0.0);
    }
  }
}

TEST_CASE("linear types and derivative-free wrapper") {
  Vector q0(1), c(1);
  q0 << 1.0;
  c << 0.5;
  Matrix D(1, 1);
  D << -0.8;
  const Budget anchor = Budget::two_good(1, 2);
  auto lin = std::make_shared<LinearTypesSampler>(
      anchor, std::vector<LinearTypesSampler::Type>{{1.0, q0, D, c}});
  const DemandDraw d = lin->draw(Budget::two_good(1.1, 2.2), 0, 0);
  CHECK(d.quantity[0] == Approx(1.0 - 0.08 + 0.1));
  DerivativeFreeSampler hidden(lin);
  CHECK_FALSE(hidden.has_derivatives());
  CHECK(std::isnan(hidden.draw(anchor, 0, 0).dq_dy[0]));
  CHECK(hidden.draw(anchor, 0, 0).quantity[0] == 1.0);
}
